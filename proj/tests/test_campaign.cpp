#include <gtest/gtest.h>

#include <algorithm>

#include "recup/campaign.hpp"
#include "recup/io.hpp"

using namespace recup;

namespace {

const ReferenceFixture& fixture() {
    static const ReferenceFixture f = load_fixture(RECUP_SOURCE_DIR "/data/reference_tables.csv");
    return f;
}

SweepSpec full_wavy_grid() {
    SweepSpec s;
    s.name = "wavy";
    SweepBlock b;
    b.layouts = {{4, 24}, {5, 24}, {5, 30}, {6, 24}};
    b.wavenumbers = {1, 2, 3, 4, 5, 6};
    s.blocks.push_back(b);
    return s;
}

SweepOptions fast_options(unsigned workers = 1) {
    SweepOptions o;
    o.config.segments = 30;
    o.workers = workers;
    return o;
}

}  // namespace

TEST(CaseIds, Format) {
    EXPECT_EQ(case_id({5, 30}, 4, 0.95), "5x30,n4,q0.95");
    EXPECT_EQ(case_id({4, 24}, 0, 1.0), "4x24,baseline,q1");
    EXPECT_EQ(format_number(1.05), "1.05");
}

TEST(CaseIds, ParseLayout) {
    EXPECT_EQ(parse_layout("6x24"), (LayoutShape{6, 24}));
    EXPECT_THROW(parse_layout("6x"), std::invalid_argument);
    EXPECT_THROW(parse_layout("x24"), std::invalid_argument);
    EXPECT_THROW(parse_layout("6y24"), std::invalid_argument);
    EXPECT_THROW(parse_layout("0x24"), std::invalid_argument);
}

TEST(Enumeration, FullWavyGrid) {
    const auto e = enumerate_cases(full_wavy_grid());
    ASSERT_EQ(e.cases.size(), 24u);
    EXPECT_TRUE(e.excluded.empty());
    EXPECT_EQ(e.cases.front().id, "4x24,n1,q1");
    EXPECT_EQ(e.cases.back().id, "6x24,n6,q1");
    for (const auto& c : e.cases) EXPECT_NEAR(c.amplitude, wavy_max_amplitude(c.wavenumber, 0.2), 1e-15);
}

TEST(Enumeration, ScalingBoundsExcludeOutOfRangeQ) {
    SweepSpec s;
    SweepBlock b;
    b.layouts = {{6, 24}, {4, 24}};
    b.wavenumbers = {4};
    b.q_values = {0.7, 0.9, 1.1};
    s.blocks.push_back(b);
    const auto e = enumerate_cases(s);
    std::vector<std::string> ids;
    for (const auto& c : e.cases) ids.push_back(c.id);
    EXPECT_EQ(ids, (std::vector<std::string>{"4x24,n4,q0.7", "4x24,n4,q0.9", "4x24,n4,q1.1", "6x24,n4,q0.9", "6x24,n4,q1.1"}));
    ASSERT_EQ(e.excluded.size(), 1u);
    EXPECT_EQ(e.excluded[0].id, "6x24,n4,q0.7");
}

TEST(Enumeration, OddAzimuthalCountExcluded) {
    SweepSpec s;
    SweepBlock b;
    b.layouts = {{5, 25}, {5, 30}};
    b.wavenumbers = {2};
    s.blocks.push_back(b);
    s.q_bounds["5x25"] = {1.0, 1.0};
    const auto e = enumerate_cases(s);
    ASSERT_EQ(e.cases.size(), 1u);
    ASSERT_EQ(e.excluded.size(), 1u);
    EXPECT_EQ(e.excluded[0].id, "5x25");
}

TEST(Enumeration, SingleCaseBaselineAndDuplicates) {
    SweepSpec s;
    SweepBlock b;
    b.layouts = {{5, 30}};
    b.baseline = true;
    s.blocks = {b, b};
    const auto e = enumerate_cases(s);
    ASSERT_EQ(e.cases.size(), 1u);
    EXPECT_EQ(e.cases[0].id, "5x30,baseline,q1");
    EXPECT_EQ(e.cases[0].amplitude, 0.0);
}

TEST(Enumeration, Errors) {
    SweepSpec empty;
    EXPECT_THROW(enumerate_cases(empty), CampaignError);
    SweepSpec custom;
    SweepBlock b;
    b.layouts = {{3, 12}};
    b.wavenumbers = {1};
    custom.blocks.push_back(b);
    EXPECT_THROW(enumerate_cases(custom), CampaignError);
    custom.q_bounds["3x12"] = {1.0, 1.0};
    EXPECT_NO_THROW(enumerate_cases(custom));
}

TEST(Enumeration, Deterministic) {
    const auto a = enumerate_cases(full_wavy_grid());
    const auto b = enumerate_cases(full_wavy_grid());
    ASSERT_EQ(a.cases.size(), b.cases.size());
    for (std::size_t k = 0; k < a.cases.size(); ++k) EXPECT_EQ(a.cases[k].id, b.cases[k].id);
}

TEST(Fixture, LookupAndAmbiguity) {
    const auto& f = fixture();
    EXPECT_EQ(f.find("5x30,n4,q0.95").source, "table3");
    EXPECT_THROW(f.find("4x24,n3,q1"), CampaignError);
    EXPECT_DOUBLE_EQ(*f.find("4x24,n3,q1", "table2").T_c_out_C, 723.3);
    EXPECT_DOUBLE_EQ(*f.find("4x24,n3,q1", "table3").T_c_out_C, 722.6);
    EXPECT_THROW(f.find("7x24,n1,q1"), CampaignError);
    EXPECT_THROW(operating_point(f.find("exp,original,Tin850")), CampaignError);
}

TEST(Ranking, BaselineTable) {
    const auto r = rank(candidates_from(fixture().select("table1")));
    ASSERT_TRUE(r.winner);
    EXPECT_EQ(*r.winner, "6x24,baseline,q1");
    EXPECT_EQ(r.ordered.back().candidate.case_id, "4x24,baseline,q1");
}

TEST(Ranking, WavyTableBestPerLayout) {
    const auto r = rank(candidates_from(fixture().select("table2")));
    EXPECT_EQ(*r.winner, "5x30,n4,q1");
    EXPECT_EQ(r.best_per_layout.at("4x24"), "4x24,n3,q1");
    EXPECT_EQ(r.best_per_layout.at("5x24"), "5x24,n4,q1");
    EXPECT_EQ(r.best_per_layout.at("5x30"), "5x30,n4,q1");
    EXPECT_EQ(r.best_per_layout.at("6x24"), "6x24,n4,q1");
}

TEST(Ranking, ScalingTableBestPerLayout) {
    const auto r = rank(candidates_from(fixture().select("table3")));
    EXPECT_EQ(*r.winner, "5x30,n4,q0.95");
    EXPECT_EQ(r.best_per_layout.at("4x24"), "4x24,n3,q0.9");
    EXPECT_EQ(r.best_per_layout.at("5x24"), "5x24,n4,q0.95");
    EXPECT_EQ(r.best_per_layout.at("6x24"), "6x24,n4,q0.95");
}

TEST(Ranking, BudgetDemotesExpensiveCases) {
    const auto rows = fixture().select("table1");
    const auto r100 = rank(candidates_from(rows), 100.0);
    EXPECT_EQ(*r100.winner, "5x24,baseline,q1");
    EXPECT_EQ(r100.best_per_layout.size(), 2u);
    const auto r90 = rank(candidates_from(rows), 90.0);
    EXPECT_EQ(*r90.winner, "4x24,baseline,q1");
    EXPECT_EQ(r90.best_per_layout.size(), 1u);
    const auto none = rank(candidates_from(rows), 10.0);
    EXPECT_FALSE(none.winner);
}

TEST(Ranking, FeasibleCountMonotoneInBudget) {
    const auto cands = candidates_from(fixture().select("table3"));
    std::size_t prev = 0;
    for (double budget = 100.0; budget <= 350.0; budget += 10.0) {
        const auto r = rank(cands, budget);
        const auto n = std::count_if(r.ordered.begin(), r.ordered.end(),
                                     [](const RankedCase& c) { return c.standing == Standing::feasible; });
        EXPECT_GE(static_cast<std::size_t>(n), prev);
        prev = static_cast<std::size_t>(n);
    }
    EXPECT_EQ(prev, cands.size());
}

TEST(Ranking, StandingOrderAndTieBreak) {
    std::vector<RankCandidate> c{
        {"b", "L", 700.0, 200.0, true, true},
        {"a", "L", 700.0, 200.0, true, true},
        {"c", "L", 700.0, 150.0, true, true},
        {"d", "L", 900.0, 100.0, false, true},
        {"e", "L", 950.0, 100.0, true, false},
    };
    const auto r = rank(c);
    std::vector<std::string> order;
    for (const auto& x : r.ordered) order.push_back(x.candidate.case_id);
    EXPECT_EQ(order, (std::vector<std::string>{"c", "a", "b", "d", "e"}));
    EXPECT_EQ(r.ordered[3].standing, Standing::infeasible);
    EXPECT_EQ(r.ordered[4].standing, Standing::not_converged);
    EXPECT_THROW(rank({}), CampaignError);
}

TEST(Comparison, SelfComparisonIsPerfect) {
    const auto pts = comparison_points(fixture().select("table2"));
    const auto r = compare_to_reference(pts, pts);
    ASSERT_TRUE(r.rank_correlation);
    EXPECT_DOUBLE_EQ(*r.rank_correlation, 1.0);
    for (const auto& d : r.deviations) {
        EXPECT_EQ(d.d_air_outlet_C, 0.0);
        EXPECT_EQ(d.d_dp_mean_Pa, 0.0);
    }
    EXPECT_EQ(r.rank_correlation_per_layout.size(), 4u);
}

TEST(Comparison, ReversedOrderGivesMinusOne) {
    auto model = comparison_points(fixture().select("table1"));
    const auto ref = model;
    const double hi = 2000.0;
    for (auto& p : model) p.air_outlet_C = hi - p.air_outlet_C;
    const auto r = compare_to_reference(model, ref);
    EXPECT_NEAR(*r.rank_correlation, -1.0, 1e-15);
}

TEST(Comparison, MissingKeysAndDuplicatesThrow) {
    const auto t1 = comparison_points(fixture().select("table1"));
    const auto t2 = comparison_points(fixture().select("table2"));
    EXPECT_THROW(compare_to_reference(t1, t2), CampaignError);
    auto dup = t1;
    dup.push_back(t1.front());
    EXPECT_THROW(compare_to_reference(t1, dup), CampaignError);
    EXPECT_THROW(compare_to_reference({}, t1), CampaignError);
}

TEST(Comparison, SpearmanWithTies) {
    // Ranks (1.5, 1.5, 3) against (1, 2, 3): r = 0.866...
    EXPECT_NEAR(*spearman({1.0, 1.0, 2.0}, {1.0, 2.0, 3.0}), std::sqrt(3.0) / 2.0, 1e-15);
    EXPECT_FALSE(spearman({1.0}, {2.0}));
    EXPECT_FALSE(spearman({1.0, 1.0}, {2.0, 3.0}));
}

TEST(Scatter, FixturePoints) {
    auto rows = fixture().select("table3");
    const auto finned = fixture().select("table5");
    rows.insert(rows.end(), finned.begin(), finned.end());
    const auto pts = scatter_points(rows);
    ASSERT_EQ(pts.size(), rows.size());
    const auto best = std::max_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.epsilon < b.epsilon; });
    EXPECT_EQ(best->case_id, "5x30,n4,q0.95");
    EXPECT_NEAR(best->epsilon, 0.818, 1e-3);
    EXPECT_NEAR(best->NTU, 3.17, 0.01);
    EXPECT_DOUBLE_EQ(best->dp_mean_Pa, 276.5);
    const auto lam = std::find_if(pts.begin(), pts.end(), [](const auto& p) { return p.case_id == "tenova-finned,laminar"; });
    ASSERT_NE(lam, pts.end());
    EXPECT_NEAR(lam->epsilon, 0.580, 1e-3);
    EXPECT_NEAR(lam->NTU, 1.17, 0.01);
}

TEST(Scatter, EmptyInputGivesHeaderOnly) {
    const std::string csv = scatter_to_csv(scatter_points(std::vector<ReferenceRow>{}));
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
}

TEST(Experimental, OrderedByMeanOutflow) {
    const auto s = summarize_experimental(fixture().rows);
    ASSERT_EQ(s.size(), 4u);
    EXPECT_EQ(s.front().recuperator, "burner4.0-checkerboard");
    EXPECT_EQ(s.back().recuperator, "original");
    EXPECT_NEAR(s.front().mean_outflow_C, (326.0 + 331.0 + 357.0) / 3.0, 1e-12);
    for (std::size_t k = 1; k < s.size(); ++k) EXPECT_LE(s[k - 1].mean_outflow_C, s[k].mean_outflow_C);
}

TEST(Sweep, WorkerCountDoesNotChangeResults) {
    SweepSpec s;
    SweepBlock b;
    b.layouts = {{4, 24}, {5, 30}};
    b.wavenumbers = {2};
    b.baseline = true;
    s.blocks.push_back(b);
    const auto serial = run_sweep(s, fast_options(1));
    const auto parallel = run_sweep(s, fast_options(3));
    ASSERT_EQ(serial.size(), 4u);
    ASSERT_EQ(parallel.size(), 4u);
    for (std::size_t k = 0; k < serial.size(); ++k) {
        EXPECT_EQ(serial[k].spec.id, parallel[k].spec.id);
        ASSERT_TRUE(serial[k].result && parallel[k].result);
        EXPECT_EQ(serial[k].result->air_outlet_temperature, parallel[k].result->air_outlet_temperature);
        EXPECT_EQ(serial[k].result->dp_mean, parallel[k].result->dp_mean);
    }
}

TEST(Sweep, SingleCaseMatchesDirectSolve) {
    SweepSpec s;
    SweepBlock b;
    b.layouts = {{5, 30}};
    b.wavenumbers = {4};
    b.q_values = {0.95};
    s.blocks.push_back(b);
    const auto opts = fast_options();
    const auto results = run_sweep(s, opts);
    ASSERT_EQ(results.size(), 1u);
    ASSERT_TRUE(results[0].converged());
    ASSERT_TRUE(results[0].ntu);

    const auto layout = build_layout(AnnulusSpec{}, 5, 30, 0.95);
    SolverConfig c = opts.config;
    c.allow_infeasible = true;
    const auto direct = solve(layout, WavyTransform{4, wavy_max_amplitude(4, 0.2), 43.0}, {}, c);
    EXPECT_EQ(results[0].result->air_outlet_temperature, direct.air_outlet_temperature);
    EXPECT_EQ(results[0].manufacturable, check_manufacturability(layout, WavyTransform{4, wavy_max_amplitude(4, 0.2), 43.0}).pass);
}

TEST(Sweep, ErrorsAreCapturedPerCase) {
    CaseSpec bad;
    bad.id = "5x7,n1,q1";
    bad.layout = {5, 7};
    bad.wavenumber = 1;
    bad.amplitude = 0.001;
    const auto results = run_sweep(std::vector<CaseSpec>{bad}, AnnulusSpec{}, fast_options());
    ASSERT_EQ(results.size(), 1u);
    EXPECT_FALSE(results[0].error.empty());
    EXPECT_FALSE(results[0].converged());
    const auto r = rank(candidates_from(results));
    EXPECT_EQ(r.ordered[0].standing, Standing::not_converged);
}
