#pragma once

/**
 * @file io.hpp
 * @brief JSON and CSV formats for layouts, properties, solver results, NTU
 *        reports, sweeps and the reference fixture.
 *
 * Files carry temperatures in degrees Celsius and lengths in metres unless a
 * column name says otherwise. Every document and table has a schema version.
 */

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "recup/campaign.hpp"
#include "recup/geometry.hpp"
#include "recup/ntu.hpp"
#include "recup/properties.hpp"
#include "recup/solver.hpp"

namespace recup {

inline constexpr int schema_version = 1;

using json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t k = 0; k < header.size(); ++k)
            if (header[k] == name) return k;
        throw FormatError("csv: missing column '" + name + "'");
    }
};

/// Splits one line, honouring double quotes ("" escapes a quote).
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                cell += '"';
                ++k;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cell));
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    if (quoted) throw FormatError("csv: unterminated quote in line '" + line + "'");
    out.push_back(std::move(cell));
    return out;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

/// Lines starting with '#' are comments; the first other line is the header.
inline CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        auto cells = split_csv_line(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw FormatError("csv: row has " + std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty()) throw FormatError("csv: no header line");
    return t;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path + "'");
    return in;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write '" + path + "'");
    out << text;
    if (!out) throw FormatError("write to '" + path + "' failed");
}

namespace detail {

inline double parse_double(const std::string& s, const char* what) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc{} || r.ptr != e) throw FormatError(std::string("invalid number for ") + what + ": '" + s + "'");
    return v;
}

inline std::optional<double> parse_optional(const std::string& s, const char* what) {
    if (s.empty()) return std::nullopt;
    return parse_double(s, what);
}

inline std::string csv_join(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t k = 0; k < cells.size(); ++k) out += (k ? "," : "") + csv_escape(cells[k]);
    return out + "\n";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Reference fixture
// ---------------------------------------------------------------------------

inline ReferenceFixture read_fixture(std::istream& in) {
    const CsvTable t = read_csv(in);
    ReferenceFixture f;
    const auto col = [&t](const char* name) { return t.column(name); };
    const std::size_t c_id = col("case_id"), c_src = col("source"), c_lay = col("layout"), c_tr = col("transform"),
                      c_n = col("wavenumber"), c_q = col("q_scale"), c_thi = col("T_h_in_C"), c_tho = col("T_h_out_C"),
                      c_tci = col("T_c_in_C"), c_tco = col("T_c_out_C"), c_dp = col("dp_mean_Pa"),
                      c_fa = col("flow_air_Nm3h"), c_fg = col("flow_gas_Nm3h");
    for (const auto& r : t.rows) {
        ReferenceRow row;
        row.case_id = r[c_id];
        row.source = r[c_src];
        if (row.source.empty()) throw FormatError("fixture row '" + row.case_id + "' has no source tag");
        row.layout = r[c_lay];
        row.transform = r[c_tr];
        if (auto n = detail::parse_optional(r[c_n], "wavenumber")) row.wavenumber = static_cast<int>(*n);
        row.q_scale = detail::parse_optional(r[c_q], "q_scale");
        row.T_h_in_C = detail::parse_double(r[c_thi], "T_h_in_C");
        row.T_h_out_C = detail::parse_double(r[c_tho], "T_h_out_C");
        row.T_c_in_C = detail::parse_optional(r[c_tci], "T_c_in_C");
        row.T_c_out_C = detail::parse_optional(r[c_tco], "T_c_out_C");
        row.dp_mean_Pa = detail::parse_optional(r[c_dp], "dp_mean_Pa");
        row.flow_air_Nm3h = detail::parse_optional(r[c_fa], "flow_air_Nm3h");
        row.flow_gas_Nm3h = detail::parse_optional(r[c_fg], "flow_gas_Nm3h");
        f.rows.push_back(std::move(row));
    }
    return f;
}

inline ReferenceFixture load_fixture(const std::string& path) {
    auto in = open_input(path);
    return read_fixture(in);
}

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

inline json to_json(const ManufacturabilityReport& r) {
    json v = json::array();
    for (const auto& x : r.violations)
        v.push_back({{"constraint", x.constraint}, {"location", x.location}, {"value", x.value}, {"limit", x.limit}});
    return {{"pass", r.pass},
            {"min_channel_thickness_m", r.min_channel_thickness},
            {"min_wall_thickness_m", r.min_wall_thickness},
            {"max_overhang_angle_deg", r.max_overhang_angle},
            {"violations", v}};
}

inline json layout_to_json(const CheckerboardLayout& layout, const WavyTransform& transform) {
    const auto channels = all_channel_metrics(layout, transform);
    json ch = json::array();
    for (const auto& c : channels) {
        json walls = json::array();
        for (const auto& w : c.shared_walls) {
            walls.push_back({{"neighbor", {w.neighbor.radial, w.neighbor.azimuthal}},
                             {"kind", w.kind == WallKind::radial_neighbor ? "radial" : "azimuthal"},
                             {"width_m", w.width}});
        }
        ch.push_back({{"index", {c.index.radial, c.index.azimuthal}},
                      {"fluid", to_string(c.fluid)},
                      {"radial_pitch_m", c.radial_pitch},
                      {"arc_pitch_m", c.arc_pitch},
                      {"flow_area_m2", c.flow_area},
                      {"wetted_perimeter_m", c.wetted_perimeter},
                      {"hydraulic_diameter_m", c.hydraulic_diameter},
                      {"aspect_ratio", c.aspect_ratio},
                      {"path_length_factor", c.path_length_factor},
                      {"shared_walls", walls}});
    }
    const auto& a = layout.annulus;
    return {{"schema_version", schema_version},
            {"layout", layout.name()},
            {"n_radial", layout.n_radial},
            {"m_azimuthal", layout.m_azimuthal},
            {"q_scale", layout.q_scale},
            {"parity", layout.parity == Parity::air_on_even ? "air_on_even" : "air_on_odd"},
            {"annulus",
             {{"r_inner_m", a.r_inner}, {"r_outer_m", a.r_outer}, {"core_length_m", a.core_length},
              {"wall_thickness_m", a.wall_thickness}}},
            {"transform",
             {{"wavenumber", transform.wavenumber}, {"amplitude_m", transform.amplitude},
              {"overhang_limit_deg", transform.overhang_limit_deg}}},
            {"radii_m", layout.radii},
            {"manufacturability", to_json(check_manufacturability(layout, transform))},
            {"channels", ch}};
}

inline AnnulusSpec annulus_from_json(const json& j, AnnulusSpec a = {}) {
    a.r_inner = j.value("r_inner_m", a.r_inner);
    a.r_outer = j.value("r_outer_m", a.r_outer);
    a.core_length = j.value("core_length_m", a.core_length);
    a.wall_thickness = j.value("wall_thickness_m", a.wall_thickness);
    return a;
}

// ---------------------------------------------------------------------------
// Properties
// ---------------------------------------------------------------------------

inline json to_json(const FluidModel& m) {
    return {{"name", m.name},
            {"gas_constant", m.gas_constant},
            {"janaf", m.janaf},
            {"sutherland_as", m.sutherland_as},
            {"sutherland_ts", m.sutherland_ts},
            {"validity_K", {m.validity.lo, m.validity.hi}}};
}

inline json to_json(const SolidModel& m) {
    return {{"name", m.name}, {"b", m.b}, {"c", m.c}, {"d", m.d}, {"e", m.e}, {"validity_K", {m.validity.lo, m.validity.hi}}};
}

inline FluidModel fluid_from_json(const json& j, FluidModel m) {
    m.name = j.value("name", m.name);
    m.gas_constant = j.value("gas_constant", m.gas_constant);
    if (j.contains("janaf")) {
        const auto& a = j.at("janaf");
        if (!a.is_array() || a.size() != 5) throw FormatError("fluid model: janaf needs five coefficients");
        for (std::size_t k = 0; k < 5; ++k) m.janaf[k] = a[k].get<double>();
    }
    m.sutherland_as = j.value("sutherland_as", m.sutherland_as);
    m.sutherland_ts = j.value("sutherland_ts", m.sutherland_ts);
    if (j.contains("validity_K")) m.validity = {j["validity_K"][0].get<double>(), j["validity_K"][1].get<double>()};
    m.validate();
    return m;
}

inline SolidModel solid_from_json(const json& j, SolidModel m) {
    m.name = j.value("name", m.name);
    m.b = j.value("b", m.b);
    m.c = j.value("c", m.c);
    m.d = j.value("d", m.d);
    m.e = j.value("e", m.e);
    if (j.contains("validity_K")) m.validity = {j["validity_K"][0].get<double>(), j["validity_K"][1].get<double>()};
    return m;
}

inline json to_json(const PropertySet& p) {
    return {{"schema_version", schema_version}, {"air", to_json(p.air)}, {"gas", to_json(p.gas)},
            {"solid", to_json(p.solid)}, {"prandtl", p.prandtl}};
}

inline PropertySet properties_from_json(const json& j, PropertySet p = {}) {
    if (j.contains("air")) p.air = fluid_from_json(j["air"], p.air);
    if (j.contains("gas")) p.gas = fluid_from_json(j["gas"], p.gas);
    if (j.contains("solid")) p.solid = solid_from_json(j["solid"], p.solid);
    p.prandtl = j.value("prandtl", p.prandtl);
    return p;
}

// ---------------------------------------------------------------------------
// Boundary conditions and solver configuration
// ---------------------------------------------------------------------------

inline json to_json(const BoundaryConditions& bc) {
    return {{"air_inlet_temperature_C", to_celsius(bc.air_inlet_temperature)},
            {"gas_inlet_temperature_C", to_celsius(bc.gas_inlet_temperature)},
            {"air_flow_Nm3h", bc.air_flow_nm3h},
            {"gas_flow_Nm3h", bc.gas_flow_nm3h},
            {"air_inlet_pressure_Pa", bc.air_inlet_pressure},
            {"gas_inlet_pressure_Pa", bc.gas_inlet_pressure}};
}

inline BoundaryConditions boundary_from_json(const json& j, BoundaryConditions bc = {}) {
    if (j.contains("air_inlet_temperature_C")) bc.air_inlet_temperature = to_kelvin(j["air_inlet_temperature_C"].get<double>());
    if (j.contains("gas_inlet_temperature_C")) bc.gas_inlet_temperature = to_kelvin(j["gas_inlet_temperature_C"].get<double>());
    bc.air_flow_nm3h = j.value("air_flow_Nm3h", bc.air_flow_nm3h);
    bc.gas_flow_nm3h = j.value("gas_flow_Nm3h", bc.gas_flow_nm3h);
    bc.air_inlet_pressure = j.value("air_inlet_pressure_Pa", bc.air_inlet_pressure);
    bc.gas_inlet_pressure = j.value("gas_inlet_pressure_Pa", bc.gas_inlet_pressure);
    bc.validate();
    return bc;
}

inline json to_json(const SolverConfig& c) {
    json j{{"segments", c.segments},
           {"tolerance_K", c.tolerance},
           {"energy_tolerance", c.energy_tolerance},
           {"max_iterations", c.max_iterations},
           {"relaxation", c.relaxation},
           {"flow_tolerance", c.flow_tolerance},
           {"nu_enhancement", c.nu_enhancement},
           {"adiabatic", c.adiabatic},
           {"allow_infeasible", c.allow_infeasible},
           {"strict_laminar", c.strict_laminar},
           {"halves", c.halves}};
    j["prescribed_u"] = c.prescribed_u ? json(*c.prescribed_u) : json(nullptr);
    return j;
}

inline SolverConfig solver_from_json(const json& j, SolverConfig c = {}) {
    c.segments = j.value("segments", c.segments);
    c.tolerance = j.value("tolerance_K", c.tolerance);
    c.energy_tolerance = j.value("energy_tolerance", c.energy_tolerance);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.relaxation = j.value("relaxation", c.relaxation);
    c.flow_tolerance = j.value("flow_tolerance", c.flow_tolerance);
    c.nu_enhancement = j.value("nu_enhancement", c.nu_enhancement);
    c.adiabatic = j.value("adiabatic", c.adiabatic);
    c.allow_infeasible = j.value("allow_infeasible", c.allow_infeasible);
    c.strict_laminar = j.value("strict_laminar", c.strict_laminar);
    c.halves = j.value("halves", c.halves);
    if (j.contains("prescribed_u") && !j["prescribed_u"].is_null()) c.prescribed_u = j["prescribed_u"].get<double>();
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Solver results
// ---------------------------------------------------------------------------

inline std::string amplitude_mm(const SimulationResult& r) { return format_number(r.amplitude * 1e3); }

inline json to_json(const SimulationResult& r) {
    json outlets = json::array();
    for (const auto& o : r.outlets) {
        outlets.push_back({{"channel_id", o.channel_id},
                           {"fluid", to_string(o.fluid)},
                           {"mass_flow_kg_s", o.mass_flow},
                           {"temperature_C", to_celsius(o.temperature)},
                           {"pressure_drop_Pa", o.pressure_drop}});
    }
    return {{"schema_version", schema_version},
            {"layout", r.layout_id},
            {"n_radial", r.n_radial},
            {"m_azimuthal", r.m_azimuthal},
            {"wavenumber", r.wavenumber},
            {"amplitude_mm", r.amplitude * 1e3},
            {"q_scale", r.q_scale},
            {"air_inlet_temperature_C", to_celsius(r.air_inlet_temperature)},
            {"gas_inlet_temperature_C", to_celsius(r.gas_inlet_temperature)},
            {"Tout_air_C", to_celsius(r.air_outlet_temperature)},
            {"Tout_gas_C", to_celsius(r.gas_outlet_temperature)},
            {"air_mass_flow_kg_s", r.air_mass_flow},
            {"gas_mass_flow_kg_s", r.gas_mass_flow},
            {"dp_air_Pa", r.dp_air},
            {"dp_gas_Pa", r.dp_gas},
            {"dp_mean_Pa", r.dp_mean},
            {"q_W", r.exchanged_heat},
            {"heat_to_air_W", r.heat_to_air},
            {"heat_from_gas_W", r.heat_from_gas},
            {"energy_imbalance", r.energy_imbalance},
            {"total_conductance_W_K", r.total_conductance},
            {"max_reynolds", r.max_reynolds},
            {"laminar_limit_exceeded", r.laminar_limit_exceeded},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"residual_history_K", r.residual_history},
            {"outlets", outlets}};
}

inline std::vector<std::string> result_csv_columns() {
    return {"layout", "n_radial", "m_azimuthal", "wavenumber", "amplitude_mm", "q_scale", "Tout_air_C", "Tout_gas_C",
            "dp_air_Pa", "dp_gas_Pa", "dp_mean_Pa", "q_W", "converged"};
}

inline std::vector<std::string> result_csv_cells(const SimulationResult& r) {
    return {r.layout_id,
            std::to_string(r.n_radial),
            std::to_string(r.m_azimuthal),
            std::to_string(r.wavenumber),
            amplitude_mm(r),
            format_number(r.q_scale),
            format_number(to_celsius(r.air_outlet_temperature)),
            format_number(to_celsius(r.gas_outlet_temperature)),
            format_number(r.dp_air),
            format_number(r.dp_gas),
            format_number(r.dp_mean),
            format_number(r.exchanged_heat),
            r.converged ? "true" : "false"};
}

/// Header plus one row.
inline std::string result_to_csv(const SimulationResult& r) {
    auto head = result_csv_columns();
    head.push_back("schema_version");
    auto row = result_csv_cells(r);
    row.push_back(std::to_string(schema_version));
    return detail::csv_join(head) + detail::csv_join(row);
}

// ---------------------------------------------------------------------------
// NTU reports
// ---------------------------------------------------------------------------

inline json to_json(const NtuReport& r) {
    return {{"schema_version", schema_version},
            {"C_hot_W_K", r.C_hot},
            {"C_cold_W_K", r.C_cold},
            {"C_min_W_K", r.C_min},
            {"C_max_W_K", r.C_max},
            {"C_star", r.C_star},
            {"q_W", r.q},
            {"q_hot_W", r.q_hot},
            {"q_cold_W", r.q_cold},
            {"q_max_W", r.q_max},
            {"epsilon", r.epsilon},
            {"NTU", r.NTU},
            {"UA_W_K", r.UA},
            {"energy_imbalance", r.energy_imbalance},
            {"min_side", r.cold_is_min ? "cold" : "hot"}};
}

inline std::string ntu_to_csv(const std::string& id, const NtuReport& r) {
    const std::vector<std::string> head{"case_id", "C_hot_W_K", "C_cold_W_K", "C_min_W_K", "C_max_W_K", "C_star", "q_W",
                                        "q_max_W", "epsilon", "NTU", "UA_W_K", "energy_imbalance", "schema_version"};
    const std::vector<std::string> row{id, format_number(r.C_hot), format_number(r.C_cold), format_number(r.C_min),
                                       format_number(r.C_max), format_number(r.C_star), format_number(r.q),
                                       format_number(r.q_max), format_number(r.epsilon), format_number(r.NTU),
                                       format_number(r.UA), format_number(r.energy_imbalance),
                                       std::to_string(schema_version)};
    return detail::csv_join(head) + detail::csv_join(row);
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

inline SweepSpec sweep_from_json(const json& j) {
    SweepSpec s;
    s.name = j.value("name", s.name);
    const std::string policy = j.value("amplitude_policy", std::string("max_for_overhang"));
    if (policy == "max_for_overhang") s.amplitude_policy = AmplitudePolicy::max_for_overhang;
    else if (policy == "explicit") s.amplitude_policy = AmplitudePolicy::explicit_value;
    else throw FormatError("sweep: unknown amplitude_policy '" + policy + "'");
    if (j.contains("amplitude_mm")) s.amplitude = j["amplitude_mm"].get<double>() * 1e-3;
    if (j.contains("dp_budget_Pa") && !j["dp_budget_Pa"].is_null()) s.dp_budget = j["dp_budget_Pa"].get<double>();
    if (j.contains("annulus")) s.annulus = annulus_from_json(j["annulus"]);
    if (j.contains("q_bounds")) {
        for (const auto& [name, b] : j["q_bounds"].items()) {
            parse_layout(name);
            s.q_bounds[name] = {b.at(0).get<double>(), b.at(1).get<double>()};
        }
    }
    if (!j.contains("blocks") || !j["blocks"].is_array()) throw FormatError("sweep: 'blocks' array required");
    for (const auto& b : j["blocks"]) {
        SweepBlock block;
        for (const auto& l : b.at("layouts")) block.layouts.push_back(parse_layout(l.get<std::string>()));
        if (b.contains("wavenumbers")) block.wavenumbers = b["wavenumbers"].get<std::vector<int>>();
        if (b.contains("q")) block.q_values = b["q"].get<std::vector<double>>();
        block.baseline = b.value("baseline", false);
        s.blocks.push_back(std::move(block));
    }
    return s;
}

inline std::vector<std::string> sweep_csv_columns() {
    std::vector<std::string> c{"case_id"};
    for (auto& x : result_csv_columns()) c.push_back(x);
    for (const char* x : {"epsilon", "NTU", "C_star", "UA_W_K", "manufacturable", "max_reynolds", "laminar_limit_exceeded",
                          "error", "schema_version"})
        c.emplace_back(x);
    return c;
}

/// One row per case in enumeration order; failed cases keep their row.
inline std::string sweep_to_csv(const std::vector<CaseResult>& results) {
    std::string out = detail::csv_join(sweep_csv_columns());
    for (const auto& c : results) {
        std::vector<std::string> row{c.spec.id};
        if (c.result) {
            for (auto& x : result_csv_cells(*c.result)) row.push_back(std::move(x));
        } else {
            row.insert(row.end(), {c.spec.layout.name(), std::to_string(c.spec.layout.n_radial),
                                   std::to_string(c.spec.layout.m_azimuthal), std::to_string(c.spec.wavenumber),
                                   format_number(c.spec.amplitude * 1e3), format_number(c.spec.q_scale), "", "", "", "",
                                   "", "", "false"});
        }
        if (c.ntu) {
            row.insert(row.end(), {format_number(c.ntu->epsilon), format_number(c.ntu->NTU), format_number(c.ntu->C_star),
                                   format_number(c.ntu->UA)});
        } else {
            row.insert(row.end(), {"", "", "", ""});
        }
        row.push_back(c.manufacturable ? "true" : "false");
        row.push_back(c.result ? format_number(c.result->max_reynolds) : "");
        row.push_back(c.result && c.result->laminar_limit_exceeded ? "true" : "false");
        row.push_back(c.error);
        row.push_back(std::to_string(schema_version));
        out += detail::csv_join(row);
    }
    return out;
}

/// Sweep CSV read back as (case, outlet temperatures, dp, NTU) records.
struct SweepRow {
    ComparisonPoint point;
    std::optional<double> epsilon;
    std::optional<double> NTU;
    bool manufacturable = true;
    bool converged = false;
};

inline std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    const CsvTable t = read_csv(in);
    const std::size_t c_id = t.column("case_id"), c_lay = t.column("layout"), c_ta = t.column("Tout_air_C"),
                      c_tg = t.column("Tout_gas_C"), c_dp = t.column("dp_mean_Pa"), c_eps = t.column("epsilon"),
                      c_ntu = t.column("NTU"), c_man = t.column("manufacturable"), c_conv = t.column("converged");
    std::vector<SweepRow> out;
    for (const auto& r : t.rows) {
        SweepRow s;
        s.point.case_id = r[c_id];
        s.point.layout = r[c_lay];
        s.converged = r[c_conv] == "true";
        s.manufacturable = r[c_man] == "true";
        if (!r[c_ta].empty()) {
            s.point.air_outlet_C = detail::parse_double(r[c_ta], "Tout_air_C");
            s.point.gas_outlet_C = detail::parse_double(r[c_tg], "Tout_gas_C");
            s.point.dp_mean_Pa = detail::parse_double(r[c_dp], "dp_mean_Pa");
        }
        s.epsilon = detail::parse_optional(r[c_eps], "epsilon");
        s.NTU = detail::parse_optional(r[c_ntu], "NTU");
        out.push_back(std::move(s));
    }
    return out;
}

inline std::string scatter_to_csv(const std::vector<ScatterPoint>& points) {
    std::string out = detail::csv_join({"case_id", "NTU", "epsilon", "dp_mean_Pa", "schema_version"});
    for (const auto& p : points) {
        out += detail::csv_join({p.case_id, format_number(p.NTU), format_number(p.epsilon), format_number(p.dp_mean_Pa),
                                 std::to_string(schema_version)});
    }
    return out;
}

inline json to_json(const RankingReport& r) {
    json ordered = json::array();
    for (const auto& c : r.ordered) {
        ordered.push_back({{"rank", c.rank},
                           {"case_id", c.candidate.case_id},
                           {"layout", c.candidate.layout},
                           {"Tout_air_C", c.candidate.air_outlet_C},
                           {"dp_mean_Pa", c.candidate.dp_mean_Pa},
                           {"standing", to_string(c.standing)},
                           {"manufacturable", c.candidate.manufacturable},
                           {"within_budget", c.within_budget}});
    }
    json best = json::object();
    for (const auto& [layout, id] : r.best_per_layout) best[layout] = id;
    return {{"schema_version", schema_version},
            {"dp_budget_Pa", r.dp_budget ? json(*r.dp_budget) : json(nullptr)},
            {"winner", r.winner ? json(*r.winner) : json(nullptr)},
            {"best_per_layout", best},
            {"ordered", ordered}};
}

inline json to_json(const ComparisonReport& r) {
    json dev = json::array();
    for (const auto& d : r.deviations) {
        dev.push_back({{"case_id", d.case_id},
                       {"d_Tout_air_C", d.d_air_outlet_C},
                       {"d_Tout_gas_C", d.d_gas_outlet_C},
                       {"d_dp_mean_Pa", d.d_dp_mean_Pa}});
    }
    json per = json::object();
    for (const auto& [layout, rho] : r.rank_correlation_per_layout) per[layout] = rho ? json(*rho) : json(nullptr);
    return {{"schema_version", schema_version},
            {"note", "model-vs-reference deviations; magnitude agreement is not claimed"},
            {"rank_correlation", r.rank_correlation ? json(*r.rank_correlation) : json(nullptr)},
            {"rank_correlation_per_layout", per},
            {"deviations", dev}};
}

inline json load_json(const std::string& path) {
    auto in = open_input(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("'" + path + "': " + e.what());
    }
}

}  // namespace recup
