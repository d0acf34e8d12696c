#pragma once

/**
 * @file campaign.hpp
 * @brief Parametric sweeps over (layout, wavenumber, q), ranking, and
 *        comparison against the shipped reference tables.
 */

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "recup/geometry.hpp"
#include "recup/ntu.hpp"
#include "recup/solver.hpp"

namespace recup {

class CampaignError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form of a double ("1", "0.95", "1e-06").
inline std::string format_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

struct LayoutShape {
    int n_radial = 0;
    int m_azimuthal = 0;

    std::string name() const { return std::to_string(n_radial) + "x" + std::to_string(m_azimuthal); }
    auto operator<=>(const LayoutShape&) const = default;
};

/// Parses "5x30".
inline LayoutShape parse_layout(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos || x == 0 || x + 1 == text.size())
        throw std::invalid_argument("layout '" + text + "' is not of the form NxM");
    LayoutShape s;
    const char* b = text.data();
    const char* e = b + text.size();
    auto r1 = std::from_chars(b, b + x, s.n_radial);
    auto r2 = std::from_chars(b + x + 1, e, s.m_azimuthal);
    if (r1.ec != std::errc{} || r1.ptr != b + x || r2.ec != std::errc{} || r2.ptr != e)
        throw std::invalid_argument("layout '" + text + "' is not of the form NxM");
    if (s.n_radial < 1 || s.m_azimuthal < 2) throw std::invalid_argument("layout '" + text + "' has too few channels");
    return s;
}

struct QBounds {
    double lo = 1.0;
    double hi = 1.0;

    bool admits(double q) const { return q >= lo - 1e-12 && q <= hi + 1e-12; }
};

/// Populated cells of the scaling table.
inline std::optional<QBounds> default_q_bounds(const LayoutShape& s) {
    static const std::map<LayoutShape, QBounds> table{
        {{4, 24}, {0.7, 1.1}},
        {{5, 24}, {0.8, 1.1}},
        {{5, 30}, {0.8, 1.1}},
        {{6, 24}, {0.9, 1.1}},
    };
    const auto it = table.find(s);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

enum class AmplitudePolicy { max_for_overhang, explicit_value };

/// One rectangular block of design points; a sweep is the union of its blocks.
struct SweepBlock {
    std::vector<LayoutShape> layouts;
    std::vector<int> wavenumbers;   // 1..6
    std::vector<double> q_values{1.0};
    bool baseline = false;          // also run the straight-channel case for every (layout, q)
};

struct SweepSpec {
    std::string name = "sweep";
    std::vector<SweepBlock> blocks;
    AmplitudePolicy amplitude_policy = AmplitudePolicy::max_for_overhang;
    double amplitude = 0.0;                     // m, explicit policy only
    std::optional<double> dp_budget;            // Pa
    std::map<std::string, QBounds> q_bounds;    // overrides and custom layouts
    AnnulusSpec annulus;
};

struct CaseSpec {
    std::string id;          // "5x30,n4,q0.95" or "4x24,baseline,q1"
    LayoutShape layout;
    int wavenumber = 0;      // 0 = straight channels
    double amplitude = 0.0;  // m
    double q_scale = 1.0;

    WavyTransform transform() const {
        return wavenumber == 0 ? WavyTransform::straight() : WavyTransform{wavenumber, amplitude, default_overhang_limit_deg};
    }
};

inline std::string case_id(const LayoutShape& layout, int wavenumber, double q) {
    return layout.name() + "," + (wavenumber == 0 ? std::string("baseline") : "n" + std::to_string(wavenumber)) + ",q" +
           format_number(q);
}

struct ExcludedCase {
    std::string id;
    std::string reason;
};

struct Enumeration {
    std::vector<CaseSpec> cases;
    std::vector<ExcludedCase> excluded;
};

inline QBounds q_bounds_for(const SweepSpec& spec, const LayoutShape& layout) {
    if (const auto it = spec.q_bounds.find(layout.name()); it != spec.q_bounds.end()) return it->second;
    if (auto b = default_q_bounds(layout)) return *b;
    throw CampaignError("layout " + layout.name() + " is not a reference layout; give explicit q bounds");
}

/// Cases ordered by (layout, wavenumber, q); duplicates collapse.
inline Enumeration enumerate_cases(const SweepSpec& spec) {
    if (spec.amplitude_policy == AmplitudePolicy::explicit_value && !(spec.amplitude >= 0.0))
        throw CampaignError("explicit amplitude must be >= 0");
    spec.annulus.validate();

    using Key = std::tuple<LayoutShape, int, double>;
    std::set<Key> keys;
    std::map<std::string, std::string> excluded;
    for (const auto& block : spec.blocks) {
        std::vector<int> waves = block.wavenumbers;
        if (block.baseline) waves.push_back(0);
        for (const auto& layout : block.layouts) {
            if (layout.m_azimuthal % 2 != 0) {
                excluded.emplace(layout.name(), "odd azimuthal count breaks the checkerboard");
                continue;
            }
            const QBounds bounds = q_bounds_for(spec, layout);
            for (int n : waves) {
                if (n < 0 || n > max_wavenumber) throw CampaignError("wavenumber " + std::to_string(n) + " outside 1..6");
                for (double q : block.q_values) {
                    if (!(q > 0.0)) throw CampaignError("q must be positive");
                    if (!bounds.admits(q)) {
                        excluded.emplace(case_id(layout, n, q), "q = " + format_number(q) + " outside admissible range [" +
                                                                    format_number(bounds.lo) + ", " +
                                                                    format_number(bounds.hi) + "] for " + layout.name());
                        continue;
                    }
                    keys.emplace(layout, n, q);
                }
            }
        }
    }

    Enumeration out;
    for (const auto& [layout, n, q] : keys) {
        CaseSpec c;
        c.layout = layout;
        c.wavenumber = n;
        c.q_scale = q;
        c.id = case_id(layout, n, q);
        if (n > 0) {
            c.amplitude = spec.amplitude_policy == AmplitudePolicy::max_for_overhang
                              ? wavy_max_amplitude(n, spec.annulus.core_length)
                              : spec.amplitude;
        }
        out.cases.push_back(std::move(c));
    }
    for (auto& [id, reason] : excluded) out.excluded.push_back({id, reason});
    if (out.cases.empty()) throw CampaignError("sweep '" + spec.name + "' enumerates no admissible cases");
    return out;
}

struct CaseResult {
    CaseSpec spec;
    std::optional<SimulationResult> result;
    std::optional<NtuReport> ntu;
    bool manufacturable = true;
    std::vector<Violation> violations;
    std::string error;  // non-empty when the case failed outright

    bool converged() const { return result && result->converged; }
};

struct SweepOptions {
    BoundaryConditions bc;
    SolverConfig config;
    PropertySet props;
    unsigned workers = 1;
};

inline CaseResult run_case(const CaseSpec& c, const AnnulusSpec& annulus, const SweepOptions& options) {
    CaseResult out;
    out.spec = c;
    try {
        const CheckerboardLayout layout = build_layout(annulus, c.layout.n_radial, c.layout.m_azimuthal, c.q_scale);
        const WavyTransform t = c.transform();
        const ManufacturabilityReport report = check_manufacturability(layout, t);
        out.manufacturable = report.pass;
        out.violations = report.violations;
        SolverConfig config = options.config;
        config.allow_infeasible = true;  // flagged, not skipped
        SimulationResult r = solve(layout, t, options.bc, config, options.props);
        r.wavenumber = c.wavenumber;
        if (r.converged && r.exchanged_heat > 0.0) out.ntu = analyze(r, options.props);
        out.result = std::move(r);
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

/// Results come back in enumeration order for any worker count.
inline std::vector<CaseResult> run_sweep(const std::vector<CaseSpec>& cases, const AnnulusSpec& annulus,
                                         const SweepOptions& options) {
    std::vector<CaseResult> results(cases.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(cases.size())));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < cases.size(); k = next++) results[k] = run_case(cases[k], annulus, options);
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return results;
}

inline std::vector<CaseResult> run_sweep(const SweepSpec& spec, const SweepOptions& options) {
    return run_sweep(enumerate_cases(spec).cases, spec.annulus, options);
}

// ---------------------------------------------------------------------------
// Reference fixture
// ---------------------------------------------------------------------------

/// One printed table entry; temperatures in °C, pressure drop in Pa.
struct ReferenceRow {
    std::string case_id;
    std::string source;      // "table1" .. "table6"
    std::string layout;
    std::string transform;
    std::optional<int> wavenumber;
    std::optional<double> q_scale;
    double T_h_in_C = 0.0;
    double T_h_out_C = 0.0;
    std::optional<double> T_c_in_C;
    std::optional<double> T_c_out_C;
    std::optional<double> dp_mean_Pa;
    std::optional<double> flow_air_Nm3h;
    std::optional<double> flow_gas_Nm3h;

    bool has_cold_side() const { return T_c_in_C && T_c_out_C; }
};

struct ReferenceFixture {
    int schema_version = 1;
    std::vector<ReferenceRow> rows;

    std::vector<ReferenceRow> select(const std::string& source) const {
        std::vector<ReferenceRow> out;
        for (const auto& r : rows)
            if (r.source == source) out.push_back(r);
        return out;
    }

    /// Looks a case up by id; an id shared by several tables needs the source.
    const ReferenceRow& find(const std::string& id, const std::string& source = {}) const {
        std::vector<const ReferenceRow*> hits;
        for (const auto& r : rows)
            if (r.case_id == id && (source.empty() || r.source == source)) hits.push_back(&r);
        if (hits.empty()) throw CampaignError("fixture has no case '" + id + "'" + (source.empty() ? "" : " in " + source));
        if (hits.size() > 1) {
            std::string which;
            for (const auto* h : hits) which += (which.empty() ? "" : ", ") + h->source;
            throw CampaignError("case '" + id + "' appears in several tables (" + which + "); choose a source");
        }
        return *hits.front();
    }
};

inline TabulatedOperatingPoint operating_point(const ReferenceRow& row) {
    if (!row.has_cold_side()) throw CampaignError("case '" + row.case_id + "' has no cold-side temperatures");
    TabulatedOperatingPoint p;
    p.temperatures = {to_kelvin(row.T_h_in_C), to_kelvin(row.T_h_out_C), to_kelvin(*row.T_c_in_C), to_kelvin(*row.T_c_out_C)};
    p.air_flow_nm3h = row.flow_air_Nm3h.value_or(34.0);
    p.gas_flow_nm3h = row.flow_gas_Nm3h.value_or(37.0);
    return p;
}

// ---------------------------------------------------------------------------
// Ranking
// ---------------------------------------------------------------------------

struct RankCandidate {
    std::string case_id;
    std::string layout;
    double air_outlet_C = 0.0;
    double dp_mean_Pa = 0.0;
    bool manufacturable = true;
    bool converged = true;
};

enum class Standing { feasible, infeasible, not_converged };

inline const char* to_string(Standing s) {
    switch (s) {
        case Standing::feasible: return "feasible";
        case Standing::infeasible: return "infeasible";
        default: return "not_converged";
    }
}

struct RankedCase {
    RankCandidate candidate;
    Standing standing = Standing::feasible;
    bool within_budget = true;
    int rank = 0;  // 1-based
};

struct RankingReport {
    std::vector<RankedCase> ordered;
    std::map<std::string, std::string> best_per_layout;  // layout -> case id, feasible cases only
    std::optional<std::string> winner;
    std::optional<double> dp_budget;
};

inline std::vector<RankCandidate> candidates_from(const std::vector<ReferenceRow>& rows) {
    std::vector<RankCandidate> out;
    for (const auto& r : rows) {
        if (!r.T_c_out_C || !r.dp_mean_Pa) continue;
        out.push_back({r.case_id, r.layout, *r.T_c_out_C, *r.dp_mean_Pa, true, true});
    }
    return out;
}

inline std::vector<RankCandidate> candidates_from(const std::vector<CaseResult>& results) {
    std::vector<RankCandidate> out;
    for (const auto& c : results) {
        RankCandidate k;
        k.case_id = c.spec.id;
        k.layout = c.spec.layout.name();
        k.manufacturable = c.manufacturable;
        k.converged = c.converged() && c.error.empty();
        if (c.result) {
            k.air_outlet_C = to_celsius(c.result->air_outlet_temperature);
            k.dp_mean_Pa = c.result->dp_mean;
        }
        out.push_back(std::move(k));
    }
    return out;
}

/// Feasible before infeasible before non-converged; within a group by air
/// outlet temperature (descending), then lower dp, then case id.
inline RankingReport rank(const std::vector<RankCandidate>& candidates, std::optional<double> dp_budget = std::nullopt) {
    if (candidates.empty()) throw CampaignError("rank: no results");
    RankingReport report;
    report.dp_budget = dp_budget;
    for (const auto& c : candidates) {
        RankedCase r{c};
        r.within_budget = !dp_budget || c.dp_mean_Pa <= *dp_budget;
        if (!c.converged) r.standing = Standing::not_converged;
        else if (!c.manufacturable || !r.within_budget) r.standing = Standing::infeasible;
        report.ordered.push_back(std::move(r));
    }
    std::sort(report.ordered.begin(), report.ordered.end(), [](const RankedCase& a, const RankedCase& b) {
        if (a.standing != b.standing) return a.standing < b.standing;
        if (a.candidate.air_outlet_C != b.candidate.air_outlet_C) return a.candidate.air_outlet_C > b.candidate.air_outlet_C;
        if (a.candidate.dp_mean_Pa != b.candidate.dp_mean_Pa) return a.candidate.dp_mean_Pa < b.candidate.dp_mean_Pa;
        return a.candidate.case_id < b.candidate.case_id;
    });
    for (std::size_t k = 0; k < report.ordered.size(); ++k) {
        auto& r = report.ordered[k];
        r.rank = static_cast<int>(k) + 1;
        if (r.standing != Standing::feasible) continue;
        report.best_per_layout.emplace(r.candidate.layout, r.candidate.case_id);
        if (!report.winner) report.winner = r.candidate.case_id;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

struct ComparisonPoint {
    std::string case_id;
    std::string layout;
    double air_outlet_C = 0.0;
    double gas_outlet_C = 0.0;
    double dp_mean_Pa = 0.0;
};

struct CaseDeviation {
    std::string case_id;
    double d_air_outlet_C = 0.0;  // model minus reference
    double d_gas_outlet_C = 0.0;
    double d_dp_mean_Pa = 0.0;
};

struct ComparisonReport {
    std::vector<CaseDeviation> deviations;
    std::optional<double> rank_correlation;  // Spearman on air outlet temperature
    std::map<std::string, std::optional<double>> rank_correlation_per_layout;
};

inline std::vector<ComparisonPoint> comparison_points(const std::vector<ReferenceRow>& rows) {
    std::vector<ComparisonPoint> out;
    for (const auto& r : rows) {
        if (!r.T_c_out_C || !r.dp_mean_Pa) continue;
        out.push_back({r.case_id, r.layout, *r.T_c_out_C, r.T_h_out_C, *r.dp_mean_Pa});
    }
    return out;
}

inline std::vector<ComparisonPoint> comparison_points(const std::vector<CaseResult>& results) {
    std::vector<ComparisonPoint> out;
    for (const auto& c : results) {
        if (!c.result) continue;
        out.push_back({c.spec.id, c.spec.layout.name(), to_celsius(c.result->air_outlet_temperature),
                       to_celsius(c.result->gas_outlet_temperature), c.result->dp_mean});
    }
    return out;
}

namespace detail {

// Ranks with ties averaged, 1-based.
inline std::vector<double> fractional_ranks(const std::vector<double>& x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&x](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace detail

/// Pearson correlation of fractional ranks; empty for fewer than two points or
/// a constant series.
inline std::optional<double> spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("spearman: series differ in length");
    if (a.size() < 2) return std::nullopt;
    const auto ra = detail::fractional_ranks(a);
    const auto rb = detail::fractional_ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t k = 0; k < ra.size(); ++k) {
        sab += (ra[k] - ma) * (rb[k] - mb);
        saa += (ra[k] - ma) * (ra[k] - ma);
        sbb += (rb[k] - mb) * (rb[k] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return std::nullopt;
    return sab / std::sqrt(saa * sbb);
}

/// Deviations of model points from reference points. Every model case must
/// exist in the reference. Magnitudes are reported, not judged.
inline ComparisonReport compare_to_reference(const std::vector<ComparisonPoint>& model,
                                             const std::vector<ComparisonPoint>& reference) {
    if (model.empty()) throw CampaignError("compare: no model cases");
    std::map<std::string, const ComparisonPoint*> ref;
    for (const auto& r : reference) {
        if (!ref.emplace(r.case_id, &r).second) throw CampaignError("compare: duplicate reference case '" + r.case_id + "'");
    }
    std::vector<std::string> missing;
    for (const auto& m : model)
        if (!ref.count(m.case_id)) missing.push_back(m.case_id);
    if (!missing.empty()) {
        std::string list;
        for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
        throw CampaignError("compare: case keys missing from reference: " + list);
    }

    ComparisonReport report;
    std::vector<double> a, b;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_layout;
    for (const auto& m : model) {
        const ComparisonPoint& r = *ref.at(m.case_id);
        report.deviations.push_back({m.case_id, m.air_outlet_C - r.air_outlet_C, m.gas_outlet_C - r.gas_outlet_C,
                                     m.dp_mean_Pa - r.dp_mean_Pa});
        a.push_back(m.air_outlet_C);
        b.push_back(r.air_outlet_C);
        by_layout[m.layout].first.push_back(m.air_outlet_C);
        by_layout[m.layout].second.push_back(r.air_outlet_C);
    }
    report.rank_correlation = spearman(a, b);
    for (const auto& [layout, series] : by_layout) report.rank_correlation_per_layout[layout] = spearman(series.first, series.second);
    return report;
}

// ---------------------------------------------------------------------------
// Scatter data and experimental summary
// ---------------------------------------------------------------------------

struct ScatterPoint {
    std::string case_id;
    double NTU = 0.0;
    double epsilon = 0.0;
    double dp_mean_Pa = 0.0;
};

inline std::vector<ScatterPoint> scatter_points(const std::vector<CaseResult>& results) {
    std::vector<ScatterPoint> out;
    for (const auto& c : results)
        if (c.result && c.ntu) out.push_back({c.spec.id, c.ntu->NTU, c.ntu->epsilon, c.result->dp_mean});
    return out;
}

inline std::vector<ScatterPoint> scatter_points(const std::vector<ReferenceRow>& rows, const PropertySet& props = {},
                                                CapacityRateMode mode = CapacityRateMode::cold_side_balance) {
    std::vector<ScatterPoint> out;
    for (const auto& r : rows) {
        if (!r.has_cold_side() || !r.dp_mean_Pa) continue;
        const NtuReport n = analyze(operating_point(r), props, mode);
        out.push_back({r.case_id, n.NTU, n.epsilon, *r.dp_mean_Pa});
    }
    return out;
}

struct ExperimentalSummary {
    std::string recuperator;
    std::vector<std::pair<double, double>> gas_in_out_C;  // ascending inlet temperature
    double mean_outflow_C = 0.0;
};

/// Recuperators ordered by mean gas outflow temperature, lowest (best) first.
inline std::vector<ExperimentalSummary> summarize_experimental(const std::vector<ReferenceRow>& rows) {
    std::map<std::string, ExperimentalSummary> by;
    for (const auto& r : rows) {
        if (r.transform != "experimental") continue;
        auto& s = by[r.layout];
        s.recuperator = r.layout;
        s.gas_in_out_C.emplace_back(r.T_h_in_C, r.T_h_out_C);
    }
    std::vector<ExperimentalSummary> out;
    for (auto& [name, s] : by) {
        std::sort(s.gas_in_out_C.begin(), s.gas_in_out_C.end());
        double sum = 0.0;
        for (const auto& p : s.gas_in_out_C) sum += p.second;
        s.mean_outflow_C = sum / static_cast<double>(s.gas_in_out_C.size());
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.mean_outflow_C != b.mean_outflow_C ? a.mean_outflow_C < b.mean_outflow_C : a.recuperator < b.recuperator;
    });
    return out;
}

}  // namespace recup
