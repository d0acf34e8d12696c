#include <gtest/gtest.h>

#include <sstream>

#include "recup/io.hpp"

using namespace recup;

TEST(Csv, SplitHandlesQuotes) {
    EXPECT_EQ(split_csv_line("a,b,,c"), (std::vector<std::string>{"a", "b", "", "c"}));
    EXPECT_EQ(split_csv_line("\"5x30,n4,q1\",table2"), (std::vector<std::string>{"5x30,n4,q1", "table2"}));
    EXPECT_EQ(split_csv_line("\"say \"\"hi\"\"\",x\r"), (std::vector<std::string>{"say \"hi\"", "x"}));
    EXPECT_THROW(split_csv_line("\"open,x"), FormatError);
}

TEST(Csv, EscapeRoundTrip) {
    for (std::string s : {"plain", "a,b", "q\"uote", ""}) {
        const auto cells = split_csv_line(csv_escape(s) + "," + csv_escape("x"));
        ASSERT_EQ(cells.size(), 2u);
        EXPECT_EQ(cells[0], s);
    }
}

TEST(Csv, ReadSkipsCommentsAndChecksWidth) {
    std::istringstream ok("# comment\n\na,b\n1,2\n# tail\n3,4\n");
    const auto t = read_csv(ok);
    EXPECT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.column("b"), 1u);
    EXPECT_THROW(t.column("c"), FormatError);
    std::istringstream bad("a,b\n1\n");
    EXPECT_THROW(read_csv(bad), FormatError);
    std::istringstream empty("# only\n");
    EXPECT_THROW(read_csv(empty), FormatError);
}

TEST(Fixture, ParsesShippedTables) {
    const auto f = load_fixture(RECUP_SOURCE_DIR "/data/reference_tables.csv");
    EXPECT_EQ(f.select("table1").size(), 4u);
    EXPECT_EQ(f.select("table2").size(), 24u);
    EXPECT_EQ(f.select("table3").size(), 28u);
    EXPECT_EQ(f.select("table4").size(), 2u);
    EXPECT_EQ(f.select("table5").size(), 3u);
    EXPECT_EQ(f.select("table6").size(), 12u);
    const auto& r = f.find("5x30,n4,q0.95", "table3");
    EXPECT_EQ(r.wavenumber, 4);
    EXPECT_DOUBLE_EQ(*r.q_scale, 0.95);
    EXPECT_DOUBLE_EQ(r.T_h_out_C, 358.8);
    EXPECT_DOUBLE_EQ(*r.dp_mean_Pa, 276.5);
    const auto& e = f.find("exp,original,Tin950");
    EXPECT_FALSE(e.has_cold_side());
    EXPECT_FALSE(e.dp_mean_Pa);
}

TEST(Fixture, RejectsMalformedRows) {
    const std::string head =
        "case_id,source,layout,transform,wavenumber,q_scale,T_h_in_C,T_h_out_C,T_c_in_C,T_c_out_C,dp_mean_Pa,flow_air_Nm3h,"
        "flow_gas_Nm3h\n";
    std::istringstream no_source(head + "x,,4x24,baseline,,1,960,500,30,600,70,34,37\n");
    EXPECT_THROW(read_fixture(no_source), FormatError);
    std::istringstream bad_number(head + "x,table1,4x24,baseline,,1,hot,500,30,600,70,34,37\n");
    EXPECT_THROW(read_fixture(bad_number), FormatError);
    std::istringstream missing_column("case_id,source\nx,table1\n");
    EXPECT_THROW(read_fixture(missing_column), FormatError);
}

TEST(Json, BoundaryRoundTrip) {
    BoundaryConditions bc;
    bc.air_inlet_temperature = to_kelvin(25.0);
    bc.gas_flow_nm3h = 40.0;
    const auto back = boundary_from_json(to_json(bc));
    EXPECT_NEAR(back.air_inlet_temperature, bc.air_inlet_temperature, 1e-12);
    EXPECT_DOUBLE_EQ(back.gas_flow_nm3h, 40.0);
    EXPECT_THROW(boundary_from_json(json{{"gas_inlet_temperature_C", 10.0}}), std::invalid_argument);
}

TEST(Json, SolverRoundTrip) {
    SolverConfig c;
    c.segments = 77;
    c.prescribed_u = 12.5;
    c.strict_laminar = true;
    const auto back = solver_from_json(to_json(c));
    EXPECT_EQ(back.segments, 77);
    ASSERT_TRUE(back.prescribed_u);
    EXPECT_DOUBLE_EQ(*back.prescribed_u, 12.5);
    EXPECT_TRUE(back.strict_laminar);
    EXPECT_FALSE(solver_from_json(to_json(SolverConfig{})).prescribed_u);
    EXPECT_THROW(solver_from_json(json{{"segments", 0}}), std::invalid_argument);
}

TEST(Json, PropertiesRoundTrip) {
    PropertySet p;
    p.air.janaf = {3.5, 0.0, 0.0, 0.0, 0.0};
    p.prandtl = 0.71;
    const auto back = properties_from_json(to_json(p));
    EXPECT_EQ(back.air.janaf, p.air.janaf);
    EXPECT_EQ(back.gas.janaf, p.gas.janaf);
    EXPECT_DOUBLE_EQ(back.prandtl, 0.71);
    EXPECT_DOUBLE_EQ(back.solid.b, p.solid.b);
    EXPECT_THROW(properties_from_json(json{{"air", {{"janaf", {1.0, 2.0}}}}}), FormatError);
}

TEST(Json, LayoutDocument) {
    const auto layout = build_layout(AnnulusSpec{}, 5, 30, 1.0);
    const auto j = layout_to_json(layout, WavyTransform{4, wavy_max_amplitude(4, 0.2), 43.0});
    EXPECT_EQ(j["schema_version"], schema_version);
    EXPECT_EQ(j["layout"], "5x30");
    EXPECT_EQ(j["channels"].size(), 150u);
    EXPECT_EQ(j["radii_m"].size(), 6u);
    EXPECT_TRUE(j["manufacturability"]["pass"].get<bool>());
    const auto a = annulus_from_json(j["annulus"]);
    EXPECT_DOUBLE_EQ(a.r_outer, 0.0745);
}

TEST(ResultCsv, ColumnsAndValues) {
    SimulationResult r;
    r.layout_id = "5x30";
    r.n_radial = 5;
    r.m_azimuthal = 30;
    r.wavenumber = 4;
    r.amplitude = 0.00185;
    r.q_scale = 0.95;
    r.air_outlet_temperature = to_kelvin(790.5);
    r.converged = true;
    std::istringstream in(result_to_csv(r));
    const auto t = read_csv(in);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.header.back(), "schema_version");
    EXPECT_EQ(t.rows[0][t.column("q_scale")], "0.95");
    EXPECT_EQ(t.rows[0][t.column("amplitude_mm")], "1.85");
    EXPECT_NEAR(std::stod(t.rows[0][t.column("Tout_air_C")]), 790.5, 1e-9);
    EXPECT_EQ(t.rows[0][t.column("converged")], "true");
}

TEST(SweepIo, SpecFromJson) {
    const auto spec = sweep_from_json(load_json(RECUP_SOURCE_DIR "/data/sweeps/scaling.json"));
    EXPECT_EQ(spec.name, "scaling");
    ASSERT_EQ(spec.blocks.size(), 2u);
    const auto e = enumerate_cases(spec);
    EXPECT_EQ(e.cases.size(), 28u);
    EXPECT_EQ(e.excluded.size(), 8u);

    const json custom = json::parse(R"({"name": "c", "amplitude_policy": "explicit", "amplitude_mm": 2,
        "dp_budget_Pa": 250, "q_bounds": {"3x12": [0.9, 1.0]},
        "blocks": [{"layouts": ["3x12"], "wavenumbers": [2], "q": [0.9, 1.0]}]})");
    const auto s = sweep_from_json(custom);
    EXPECT_EQ(s.amplitude_policy, AmplitudePolicy::explicit_value);
    EXPECT_DOUBLE_EQ(s.amplitude, 0.002);
    EXPECT_DOUBLE_EQ(*s.dp_budget, 250.0);
    EXPECT_EQ(enumerate_cases(s).cases.size(), 2u);
    EXPECT_THROW(sweep_from_json(json{{"name", "x"}}), FormatError);
    EXPECT_THROW(sweep_from_json(json{{"amplitude_policy", "huge"}, {"blocks", json::array()}}), FormatError);
}

TEST(SweepIo, CsvRoundTripKeepsFailedRows) {
    CaseResult ok;
    ok.spec.id = "4x24,n1,q1";
    ok.spec.layout = {4, 24};
    ok.result.emplace();
    ok.result->layout_id = "4x24";
    ok.result->air_outlet_temperature = to_kelvin(700.0);
    ok.result->gas_outlet_temperature = to_kelvin(400.0);
    ok.result->dp_mean = 120.0;
    ok.result->converged = true;
    NtuReport n;
    n.epsilon = 0.7;
    n.NTU = 2.0;
    ok.ntu = n;
    CaseResult bad;
    bad.spec.id = "4x7,n1,q1";
    bad.spec.layout = {4, 7};
    bad.error = "odd, really";
    std::istringstream in(sweep_to_csv({ok, bad}));
    const auto rows = read_sweep_csv(in);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_TRUE(rows[0].converged);
    EXPECT_NEAR(rows[0].point.air_outlet_C, 700.0, 1e-9);
    EXPECT_DOUBLE_EQ(*rows[0].NTU, 2.0);
    EXPECT_FALSE(rows[1].converged);
    EXPECT_FALSE(rows[1].epsilon);
}

TEST(ReportJson, RankingAndComparison) {
    std::vector<RankCandidate> c{{"a", "4x24", 700.0, 100.0, true, true}, {"b", "5x30", 750.0, 300.0, true, true}};
    const auto r = to_json(rank(c, 200.0));
    EXPECT_EQ(r["winner"], "a");
    EXPECT_EQ(r["ordered"][1]["standing"], "infeasible");
    std::vector<ComparisonPoint> p{{"a", "4x24", 700.0, 400.0, 100.0}, {"b", "4x24", 750.0, 380.0, 300.0}};
    const auto cmp = to_json(compare_to_reference(p, p));
    EXPECT_DOUBLE_EQ(cmp["rank_correlation"].get<double>(), 1.0);
    EXPECT_EQ(cmp["deviations"].size(), 2u);
}
