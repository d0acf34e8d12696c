// recup: command-line front end for the recuperator design toolkit.
//
// Exit codes: 0 ok, 1 other error, 2 infeasible layout, 3 not converged, 64 usage.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "recup/recup.hpp"

namespace fs = std::filesystem;
using namespace recup;

namespace {

enum ExitCode : int { ok = 0, failure = 1, infeasible = 2, not_converged = 3, usage = 64 };

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Globals {
    std::string config_path;
    std::string out_dir = ".";
    unsigned workers = 1;
    bool verbose = false;

    json config = json::object();
    BoundaryConditions bc;
    SolverConfig solver;
    PropertySet props;
    AnnulusSpec annulus;

    void load() {
        if (!config_path.empty()) {
            if (!fs::exists(config_path)) throw UsageError("config file '" + config_path + "' does not exist");
            config = load_json(config_path);
        }
        if (config.contains("boundary")) bc = boundary_from_json(config["boundary"]);
        if (config.contains("solver")) solver = solver_from_json(config["solver"]);
        if (config.contains("properties")) props = properties_from_json(config["properties"]);
        if (config.contains("annulus")) annulus = annulus_from_json(config["annulus"]);
    }

    std::string fixture(const std::string& flag) const {
        if (!flag.empty()) return flag;
        if (config.contains("fixture")) return config["fixture"].get<std::string>();
        throw UsageError("no fixture given (use --fixture or the config 'fixture' key)");
    }

    fs::path output(const std::string& name) const {
        fs::create_directories(out_dir);
        return fs::path(out_dir) / name;
    }

    void log(const std::string& msg) const {
        if (verbose) std::cerr << msg << "\n";
    }
};

std::string fmt(double v, int precision = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

std::string slug(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '+' || c == '/' || c == ' ') c = '_';
    return s;
}

struct DesignFlags {
    std::string layout;
    int wavenumber = 0;
    std::optional<double> amplitude_mm;
    double q = 1.0;
    bool allow_infeasible = false;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--layout", layout, "Channel layout NxM, e.g. 5x30")->required();
        cmd->add_option("--wavenumber", wavenumber, "Wavy wavenumber 1..6 (0 = straight channels)")->check(CLI::Range(0, 6));
        cmd->add_option("--amplitude-mm", amplitude_mm, "Wave amplitude in mm (default: largest allowed by the overhang limit)");
        cmd->add_option("--q", q, "Radial scaling factor")->check(CLI::PositiveNumber);
        cmd->add_flag("--allow-infeasible", allow_infeasible, "Proceed even if manufacturability checks fail");
    }

    std::pair<CheckerboardLayout, WavyTransform> build(const AnnulusSpec& annulus) const {
        LayoutShape shape;
        try {
            shape = parse_layout(layout);
            WavyTransform t = WavyTransform::straight();
            if (wavenumber > 0) {
                t.wavenumber = wavenumber;
                t.amplitude = amplitude_mm ? *amplitude_mm * 1e-3 : wavy_max_amplitude(wavenumber, annulus.core_length);
            } else if (amplitude_mm && *amplitude_mm != 0.0) {
                throw UsageError("--amplitude-mm needs --wavenumber >= 1");
            }
            t.validate();
            return {build_layout(annulus, shape.n_radial, shape.m_azimuthal, q), t};
        } catch (const UsageError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
};

void print_report(const ManufacturabilityReport& r) {
    std::cout << "manufacturability: " << (r.pass ? "pass" : "FAIL") << "\n"
              << "  min clear channel thickness: " << fmt(r.min_channel_thickness * 1e3, 3) << " mm\n"
              << "  wall thickness:              " << fmt(r.min_wall_thickness * 1e3, 3) << " mm\n"
              << "  max overhang angle:          " << fmt(r.max_overhang_angle, 3) << " deg\n";
    for (const auto& v : r.violations) {
        std::cout << "  violation: " << v.constraint << " at " << v.location << ": " << format_number(v.value) << " (limit "
                  << format_number(v.limit) << ")\n";
    }
}

int cmd_geom(const Globals& g, const DesignFlags& d) {
    const auto [layout, transform] = d.build(g.annulus);
    const ManufacturabilityReport report = check_manufacturability(layout, transform);
    std::cout << "layout " << layout.name() << ", wavenumber " << (transform.is_straight() ? 0 : transform.wavenumber)
              << ", amplitude " << fmt(transform.amplitude * 1e3) << " mm, q " << format_number(layout.q_scale) << "\n";
    print_report(report);
    const fs::path path = g.output("layout_" + layout.name() + ".json");
    write_text_file(path.string(), layout_to_json(layout, transform).dump(2) + "\n");
    std::cout << "wrote " << path.string() << "\n";
    return report.pass || d.allow_infeasible ? ok : infeasible;
}

struct PropsFlags {
    std::string fluid = "air";
    std::vector<double> temperatures{300.0};
    bool celsius = false;
};

int cmd_props(const Globals& g, const PropsFlags& f) {
    json rows = json::array();
    for (double t : f.temperatures) {
        const double T = f.celsius ? to_kelvin(t) : t;
        json row{{"T_K", T}};
        if (f.fluid == "solid") {
            row["k_W_mK"] = solid_conductivity(g.props.solid, T);
        } else {
            const FluidModel& m = f.fluid == "air" ? g.props.air : g.props.gas;
            row["cp_J_kgK"] = cp(m, T);
            row["mu_Pa_s"] = viscosity(m, T);
            row["rho_kg_m3"] = density(m, normal_pressure, T);
            row["k_W_mK"] = fluid_conductivity(m, T, g.props.prandtl);
        }
        std::cout << row.dump() << "\n";
        rows.push_back(row);
    }
    json doc{{"schema_version", schema_version}, {"fluid", f.fluid}, {"pressure_Pa", normal_pressure}, {"values", rows}};
    const fs::path path = g.output("props_" + f.fluid + ".json");
    write_text_file(path.string(), doc.dump(2) + "\n");
    g.log("wrote " + path.string());
    return ok;
}

struct SimulateFlags {
    DesignFlags design;
    bool adiabatic = false;
    std::optional<int> segments;
    std::optional<double> nu_enhancement;
    bool strict_laminar = false;
};

int cmd_simulate(const Globals& g, const SimulateFlags& f) {
    const auto [layout, transform] = f.design.build(g.annulus);
    SolverConfig config = g.solver;
    config.adiabatic = config.adiabatic || f.adiabatic;
    config.allow_infeasible = config.allow_infeasible || f.design.allow_infeasible;
    config.strict_laminar = config.strict_laminar || f.strict_laminar;
    if (f.segments) config.segments = *f.segments;
    if (f.nu_enhancement) config.nu_enhancement = *f.nu_enhancement;

    SimulationResult r;
    try {
        r = solve(layout, transform, g.bc, config, g.props);
    } catch (const InfeasibleLayoutError& e) {
        std::cerr << "error: " << e.what() << "\n";
        print_report(e.report);
        return infeasible;
    }
    if (transform.is_straight()) r.wavenumber = 0;

    std::cout << "case " << layout.name() << " n=" << r.wavenumber << " q=" << format_number(r.q_scale)
              << (config.adiabatic ? " (adiabatic)" : "") << "\n"
              << "  Tout_air  " << fmt(to_celsius(r.air_outlet_temperature), 2) << " C\n"
              << "  Tout_gas  " << fmt(to_celsius(r.gas_outlet_temperature), 2) << " C\n"
              << "  dp_air    " << fmt(r.dp_air, 2) << " Pa\n"
              << "  dp_gas    " << fmt(r.dp_gas, 2) << " Pa\n"
              << "  dp_mean   " << fmt(r.dp_mean, 2) << " Pa\n"
              << "  q         " << fmt(r.exchanged_heat, 1) << " W\n"
              << "  max Re    " << fmt(r.max_reynolds, 0) << (r.laminar_limit_exceeded ? " (above laminar limit)" : "") << "\n"
              << "  converged " << (r.converged ? "yes" : "no") << " after " << r.iterations << " iterations\n";
    if (r.converged && r.exchanged_heat > 0.0) {
        const NtuReport n = analyze(r, g.props);
        std::cout << "  epsilon   " << fmt(n.epsilon) << "\n  NTU       " << fmt(n.NTU) << "\n  C*        " << fmt(n.C_star)
                  << "\n";
    }
    const std::string stem = "result_" + layout.name() + "_n" + std::to_string(r.wavenumber) + "_q" + format_number(r.q_scale);
    write_text_file(g.output(stem + ".json").string(), to_json(r).dump(2) + "\n");
    write_text_file(g.output(stem + ".csv").string(), result_to_csv(r));
    g.log("wrote " + g.output(stem + ".json").string());
    return r.converged ? ok : not_converged;
}

struct SweepFlags {
    std::string spec;
    std::optional<double> dp_budget;
};

int cmd_sweep(const Globals& g, const SweepFlags& f) {
    if (!fs::exists(f.spec)) throw UsageError("sweep spec '" + f.spec + "' does not exist");
    const json doc = load_json(f.spec);
    SweepSpec spec = sweep_from_json(doc);
    if (!doc.contains("annulus")) spec.annulus = g.annulus;
    if (f.dp_budget) spec.dp_budget = f.dp_budget;
    const Enumeration cases = enumerate_cases(spec);
    for (const auto& x : cases.excluded) std::cerr << "excluded " << x.id << ": " << x.reason << "\n";
    g.log("running " + std::to_string(cases.cases.size()) + " cases on " + std::to_string(g.workers) + " workers");

    SweepOptions options{g.bc, g.solver, g.props, g.workers};
    const auto results = run_sweep(cases.cases, spec.annulus, options);

    const fs::path csv = g.output(spec.name + ".csv");
    write_text_file(csv.string(), sweep_to_csv(results));
    const RankingReport ranking = rank(candidates_from(results), spec.dp_budget);
    write_text_file(g.output(spec.name + "_ranking.json").string(), to_json(ranking).dump(2) + "\n");

    int failed = 0;
    for (const auto& c : results) {
        if (!c.error.empty()) std::cerr << "case " << c.spec.id << " failed: " << c.error << "\n";
        if (!c.converged()) ++failed;
        if (c.result) {
            g.log(c.spec.id + ": Tout_air " + fmt(to_celsius(c.result->air_outlet_temperature), 2) + " C, dp_mean " +
                  fmt(c.result->dp_mean, 2) + " Pa" + (c.manufacturable ? "" : " [infeasible]"));
        }
    }
    std::cout << results.size() << " cases, " << failed << " not converged; best: " << ranking.winner.value_or("(none)") << "\n";
    std::cout << "wrote " << csv.string() << "\n";
    return failed == 0 ? ok : not_converged;
}

struct NtuFlags {
    std::string fixture;
    std::string case_id;
    std::string source;
    std::string result;
    std::string mode = "balance";
};

int cmd_ntu(const Globals& g, const NtuFlags& f) {
    NtuReport n;
    std::string id;
    if (!f.result.empty()) {
        if (!f.case_id.empty()) throw UsageError("use either --result or --case, not both");
        const json r = load_json(f.result);
        const StreamTemperatures t{to_kelvin(r.at("gas_inlet_temperature_C").get<double>()),
                                   to_kelvin(r.at("Tout_gas_C").get<double>()),
                                   to_kelvin(r.at("air_inlet_temperature_C").get<double>()),
                                   to_kelvin(r.at("Tout_air_C").get<double>())};
        const double C_hot = heat_capacity_rate(g.props.gas, r.at("gas_mass_flow_kg_s").get<double>(), t.hot_in, t.hot_out);
        const double C_cold = heat_capacity_rate(g.props.air, r.at("air_mass_flow_kg_s").get<double>(), t.cold_in, t.cold_out);
        n = analyze(t, C_hot, C_cold);
        id = r.contains("layout") ? case_id(parse_layout(r["layout"].get<std::string>()), r.value("wavenumber", 0),
                                            r.value("q_scale", 1.0))
                                  : std::string("result");
    } else {
        if (f.case_id.empty()) throw UsageError("ntu needs --case (with a fixture) or --result");
        const ReferenceFixture fixture = load_fixture(g.fixture(f.fixture));
        const ReferenceRow& row = fixture.find(f.case_id, f.source);
        n = analyze(operating_point(row), g.props, capacity_rate_mode_from_string(f.mode));
        id = row.case_id;
        std::cout << "case " << row.case_id << " (" << row.source << ", C* from " << f.mode << ")\n";
    }
    std::cout << "  epsilon " << fmt(n.epsilon, 3) << "\n"
              << "  NTU     " << fmt(n.NTU, 2) << "\n"
              << "  C*      " << fmt(n.C_star, 3) << "\n"
              << "  C_min   " << fmt(n.C_min, 3) << " W/K (" << (n.cold_is_min ? "air" : "gas") << ")\n"
              << "  UA      " << fmt(n.UA, 3) << " W/K\n"
              << "  q       " << fmt(n.q, 1) << " W of q_max " << fmt(n.q_max, 1) << " W\n";
    write_text_file(g.output("ntu_" + slug(id) + ".json").string(), to_json(n).dump(2) + "\n");
    write_text_file(g.output("ntu_" + slug(id) + ".csv").string(), ntu_to_csv(id, n));
    return ok;
}

struct CompareFlags {
    std::string fixture;
    std::string results;
    std::string source = "table2";
    std::optional<double> dp_budget;
};

int cmd_compare(const Globals& g, const CompareFlags& f) {
    const ReferenceFixture fixture = load_fixture(g.fixture(f.fixture));
    const auto reference_rows = fixture.select(f.source);
    if (reference_rows.empty()) throw UsageError("fixture has no rows for source '" + f.source + "'");

    std::vector<RankCandidate> candidates;
    std::vector<ComparisonPoint> model;
    if (f.results.empty()) {
        candidates = candidates_from(reference_rows);
        model = comparison_points(reference_rows);
    } else {
        auto in = open_input(f.results);
        for (const auto& row : read_sweep_csv(in)) {
            candidates.push_back({row.point.case_id, row.point.layout, row.point.air_outlet_C, row.point.dp_mean_Pa,
                                  row.manufacturable, row.converged});
            if (row.converged) model.push_back(row.point);
        }
    }

    const RankingReport ranking = rank(candidates, f.dp_budget);
    std::cout << "ranking (" << (f.results.empty() ? f.source : f.results) << "):\n";
    for (const auto& [layout, id] : ranking.best_per_layout) std::cout << "  best " << layout << ": " << id << "\n";
    std::cout << "  overall: " << ranking.winner.value_or("(no feasible case)") << "\n";
    write_text_file(g.output("ranking.json").string(), to_json(ranking).dump(2) + "\n");

    const ComparisonReport cmp = compare_to_reference(model, comparison_points(reference_rows));
    std::cout << "rank correlation of air outlet T vs " << f.source << ": "
              << (cmp.rank_correlation ? fmt(*cmp.rank_correlation, 3) : std::string("n/a")) << "\n";
    for (const auto& [layout, rho] : cmp.rank_correlation_per_layout)
        std::cout << "  " << layout << ": " << (rho ? fmt(*rho, 3) : std::string("n/a")) << "\n";
    write_text_file(g.output("comparison.json").string(), to_json(cmp).dump(2) + "\n");
    return ok;
}

struct ScatterFlags {
    std::string fixture;
    std::string results;
    std::vector<std::string> sources{"table3", "table5"};
    std::string mode = "balance";
};

int cmd_scatter(const Globals& g, const ScatterFlags& f) {
    std::vector<ScatterPoint> points;
    if (!f.results.empty()) {
        auto in = open_input(f.results);
        for (const auto& row : read_sweep_csv(in)) {
            if (row.NTU && row.epsilon) points.push_back({row.point.case_id, *row.NTU, *row.epsilon, row.point.dp_mean_Pa});
        }
    }
    if (!f.fixture.empty() || g.config.contains("fixture")) {
        const ReferenceFixture fixture = load_fixture(g.fixture(f.fixture));
        const CapacityRateMode mode = capacity_rate_mode_from_string(f.mode);
        for (const auto& src : f.sources)
            for (auto& p : scatter_points(fixture.select(src), g.props, mode)) points.push_back(std::move(p));
    }
    const fs::path path = g.output("scatter.csv");
    write_text_file(path.string(), scatter_to_csv(points));
    std::cout << points.size() << " points; wrote " << path.string() << "\n";
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Recuperator design toolkit: geometry, properties, counterflow solver, ε-NTU analysis and sweeps"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "JSON configuration (boundary, solver, properties, annulus, fixture)");
    app.add_option("--out", g.out_dir, "Output directory");
    app.add_option("--workers", g.workers, "Worker threads for sweeps")->check(CLI::Range(1u, 256u));
    app.add_flag("-v,--verbose", g.verbose, "Verbose diagnostics on stderr");

    DesignFlags geom;
    auto* c_geom = app.add_subcommand("geom", "Build a layout, check manufacturability, write layout JSON")->fallthrough();
    geom.add_to(c_geom);

    PropsFlags props;
    auto* c_props = app.add_subcommand("props", "Evaluate property models")->fallthrough();
    c_props->add_option("--fluid", props.fluid, "air, gas or solid")->check(CLI::IsMember({"air", "gas", "solid"}));
    c_props->add_option("--T", props.temperatures, "Temperatures (K unless --celsius)")->expected(1, -1);
    c_props->add_flag("--celsius", props.celsius, "Read --T in degrees Celsius");

    SimulateFlags sim;
    auto* c_sim = app.add_subcommand("simulate", "Solve one design point")->fallthrough();
    sim.design.add_to(c_sim);
    c_sim->add_flag("--adiabatic", sim.adiabatic, "Zero wall conductance");
    c_sim->add_option("--segments", sim.segments, "Axial segments per half")->check(CLI::PositiveNumber);
    c_sim->add_option("--nu-enhancement", sim.nu_enhancement, "Multiplier on the Nusselt number");
    c_sim->add_flag("--strict-laminar", sim.strict_laminar, "Fail if the converged state reaches Re >= 2300");

    SweepFlags sweep;
    auto* c_sweep = app.add_subcommand("sweep", "Run a parametric sweep")->fallthrough();
    c_sweep->add_option("--spec", sweep.spec, "Sweep spec JSON")->required();
    c_sweep->add_option("--dp-budget", sweep.dp_budget, "Mean pressure-drop budget in Pa");

    NtuFlags ntu;
    auto* c_ntu = app.add_subcommand("ntu", "ε-NTU analysis of a fixture case or a simulate result")->fallthrough();
    c_ntu->add_option("--fixture", ntu.fixture, "Reference fixture CSV");
    c_ntu->add_option("--case", ntu.case_id, "Fixture case id, e.g. \"5x30,n4,q0.95\"");
    c_ntu->add_option("--source", ntu.source, "Fixture table when a case id is shared");
    c_ntu->add_option("--result", ntu.result, "Result JSON written by simulate");
    c_ntu->add_option("--mode", ntu.mode, "Hot-side capacity rate: balance or properties")
        ->check(CLI::IsMember({"balance", "properties"}));

    CompareFlags cmp;
    auto* c_cmp = app.add_subcommand("compare", "Rank cases and compare them with the reference tables")->fallthrough();
    c_cmp->add_option("--fixture", cmp.fixture, "Reference fixture CSV");
    c_cmp->add_option("--results", cmp.results, "Sweep CSV (default: rank the fixture rows themselves)");
    c_cmp->add_option("--source", cmp.source, "Fixture table to compare with");
    c_cmp->add_option("--dp-budget", cmp.dp_budget, "Mean pressure-drop budget in Pa");

    ScatterFlags sc;
    auto* c_sc = app.add_subcommand("scatter", "Export (NTU, ε, Δp) points")->fallthrough();
    c_sc->add_option("--fixture", sc.fixture, "Reference fixture CSV");
    c_sc->add_option("--results", sc.results, "Sweep CSV");
    c_sc->add_option("--sources", sc.sources, "Fixture tables to include");
    c_sc->add_option("--mode", sc.mode, "Hot-side capacity rate: balance or properties")
        ->check(CLI::IsMember({"balance", "properties"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        g.load();
        if (!g.config_path.empty() && g.out_dir == "." && g.config.contains("out")) g.out_dir = g.config["out"].get<std::string>();
        if (*c_geom) return cmd_geom(g, geom);
        if (*c_props) return cmd_props(g, props);
        if (*c_sim) return cmd_simulate(g, sim);
        if (*c_sweep) return cmd_sweep(g, sweep);
        if (*c_ntu) return cmd_ntu(g, ntu);
        if (*c_cmp) return cmd_compare(g, cmp);
        if (*c_sc) return cmd_scatter(g, sc);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return usage;
    } catch (const InfeasibleLayoutError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return infeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return failure;
    }
    return usage;
}
