#pragma once

/**
 * @file geometry.hpp
 * @brief Checkerboard channel layouts in an annulus, the axial wavy
 *        deformation, and additive-manufacturing constraint checks.
 *
 * Conventions: lengths in metres, angles in degrees. Row index i runs
 * outward from the inner cylinder, column index j runs azimuthally and wraps
 * at m_azimuthal.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace recup {

class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Fluid { air, gas };

inline const char* to_string(Fluid f) { return f == Fluid::air ? "air" : "gas"; }
inline Fluid opposite(Fluid f) { return f == Fluid::air ? Fluid::gas : Fluid::air; }

// Which checkerboard colour carries air: cells with (i + j) even or odd.
enum class Parity { air_on_even, air_on_odd };

struct AnnulusSpec {
    double r_inner = 0.0325;
    double r_outer = 0.0745;
    double core_length = 0.200;     // axial length of one half's core
    double wall_thickness = 0.002;

    void validate() const {
        if (!(r_inner > 0.0 && r_outer > r_inner)) throw GeometryError("annulus: require 0 < r_inner < r_outer");
        if (!(core_length > 0.0)) throw GeometryError("annulus: core_length must be positive");
        if (!(wall_thickness > 0.0)) throw GeometryError("annulus: wall_thickness must be positive");
    }

    double gap() const { return r_outer - r_inner; }
};

/// Radial boundaries r_0 = r_inner < ... < r_n = r_outer. Row thicknesses
/// follow t_{i+1} = q t_i, so q < 1 thins the outer rows.
inline std::vector<double> radial_grid(const AnnulusSpec& annulus, int n_radial, double q_scale) {
    annulus.validate();
    if (n_radial < 1) throw GeometryError("radial_grid: n_radial must be at least 1");
    if (!(q_scale > 0.0) || !std::isfinite(q_scale)) throw GeometryError("radial_grid: q_scale must be positive");

    std::vector<double> weights(static_cast<std::size_t>(n_radial));
    double w = 1.0;
    double total = 0.0;
    for (auto& wi : weights) {
        wi = w;
        total += w;
        w *= q_scale;
    }
    std::vector<double> radii(static_cast<std::size_t>(n_radial) + 1);
    radii.front() = annulus.r_inner;
    double cumulative = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        cumulative += weights[i];
        radii[i + 1] = annulus.r_inner + annulus.gap() * (cumulative / total);
    }
    radii.back() = annulus.r_outer;
    return radii;
}

inline std::vector<double> radial_thicknesses(const std::vector<double>& radii) {
    std::vector<double> t;
    t.reserve(radii.size() > 0 ? radii.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < radii.size(); ++i) t.push_back(radii[i + 1] - radii[i]);
    return t;
}

struct ChannelIndex {
    int radial = 0;
    int azimuthal = 0;

    friend bool operator==(const ChannelIndex&, const ChannelIndex&) = default;
};

enum class WallKind {
    azimuthal_neighbor,  // radial wall between columns j and j+-1
    radial_neighbor      // arc wall between rows i and i+-1
};

struct SharedWall {
    ChannelIndex neighbor;
    std::size_t neighbor_id = 0;
    WallKind kind = WallKind::azimuthal_neighbor;
    double width = 0.0;  // m, in the cross-section plane
};

/// Cross-section cell of the checkerboard: position, fluid and shared walls.
struct ChannelCell {
    ChannelIndex index;
    Fluid fluid = Fluid::air;
    double r_in = 0.0;
    double r_out = 0.0;
    double sector_angle = 0.0;  // rad
    std::vector<SharedWall> shared_walls;

    double radial_pitch() const { return r_out - r_in; }
    double arc_pitch() const { return sector_angle * 0.5 * (r_in + r_out); }
};

struct CheckerboardLayout {
    AnnulusSpec annulus;
    int n_radial = 0;
    int m_azimuthal = 0;
    double q_scale = 1.0;
    Parity parity = Parity::air_on_even;
    std::vector<double> radii;
    std::vector<ChannelCell> channels;  // row-major: id = i * m + j

    std::size_t id(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(m_azimuthal) + static_cast<std::size_t>(j);
    }
    const ChannelCell& at(ChannelIndex idx) const { return channels.at(id(idx.radial, idx.azimuthal)); }
    std::string name() const { return std::to_string(n_radial) + "x" + std::to_string(m_azimuthal); }

    std::size_t count(Fluid f) const {
        return static_cast<std::size_t>(
            std::count_if(channels.begin(), channels.end(), [f](const ChannelCell& c) { return c.fluid == f; }));
    }
};

inline Fluid fluid_for(Parity parity, int i, int j) {
    const bool even = ((i + j) % 2) == 0;
    return (even == (parity == Parity::air_on_even)) ? Fluid::air : Fluid::gas;
}

inline CheckerboardLayout build_layout(const AnnulusSpec& annulus, int n_radial, int m_azimuthal, double q_scale,
                                       Parity parity = Parity::air_on_even) {
    if (m_azimuthal < 2) throw GeometryError("build_layout: m_azimuthal must be at least 2");
    if (m_azimuthal % 2 != 0)
        throw GeometryError("build_layout: m_azimuthal = " + std::to_string(m_azimuthal) +
                            " is odd; the checkerboard would clash at the periodic seam");

    CheckerboardLayout layout;
    layout.annulus = annulus;
    layout.n_radial = n_radial;
    layout.m_azimuthal = m_azimuthal;
    layout.q_scale = q_scale;
    layout.parity = parity;
    layout.radii = radial_grid(annulus, n_radial, q_scale);

    const double theta = 2.0 * std::numbers::pi / m_azimuthal;
    layout.channels.reserve(static_cast<std::size_t>(n_radial * m_azimuthal));
    for (int i = 0; i < n_radial; ++i) {
        for (int j = 0; j < m_azimuthal; ++j) {
            ChannelCell cell;
            cell.index = {i, j};
            cell.fluid = fluid_for(parity, i, j);
            cell.r_in = layout.radii[static_cast<std::size_t>(i)];
            cell.r_out = layout.radii[static_cast<std::size_t>(i) + 1];
            cell.sector_angle = theta;

            const double radial_len = cell.radial_pitch();
            for (int dj : {-1, +1}) {
                const int nj = (j + dj + m_azimuthal) % m_azimuthal;
                cell.shared_walls.push_back({{i, nj}, layout.id(i, nj), WallKind::azimuthal_neighbor, radial_len});
            }
            if (i > 0) {
                cell.shared_walls.push_back({{i - 1, j}, layout.id(i - 1, j), WallKind::radial_neighbor, theta * cell.r_in});
            }
            if (i + 1 < n_radial) {
                cell.shared_walls.push_back({{i + 1, j}, layout.id(i + 1, j), WallKind::radial_neighbor, theta * cell.r_out});
            }
            layout.channels.push_back(std::move(cell));
        }
    }
    return layout;
}

// ---------------------------------------------------------------------------
// Wavy transform: f(z) = A (cos(2 pi n z / L) - 1)
// ---------------------------------------------------------------------------

inline constexpr double default_overhang_limit_deg = 43.0;
inline constexpr int max_wavenumber = 6;

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

struct WavyTransform {
    int wavenumber = 1;
    double amplitude = 0.0;  // m
    double overhang_limit_deg = default_overhang_limit_deg;

    static WavyTransform straight() { return WavyTransform{1, 0.0, default_overhang_limit_deg}; }

    void validate() const {
        if (wavenumber < 1 || wavenumber > max_wavenumber)
            throw GeometryError("wavy transform: wavenumber must be an integer in [1, 6]");
        if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw GeometryError("wavy transform: amplitude must be >= 0");
        if (!(overhang_limit_deg > 0.0 && overhang_limit_deg < 90.0))
            throw GeometryError("wavy transform: overhang limit must lie in (0, 90) degrees");
    }

    bool is_straight() const { return amplitude == 0.0; }

    /// max |f'(z)| = 2 pi n A / L.
    double max_slope(double L) const { return 2.0 * std::numbers::pi * wavenumber * amplitude / L; }
};

inline double wavy_profile(const WavyTransform& t, double L, double z) {
    if (!(L > 0.0)) throw GeometryError("wavy_profile: L must be positive");
    if (!(z >= 0.0 && z <= L)) throw GeometryError("wavy_profile: z outside [0, L]");
    return t.amplitude * (std::cos(2.0 * std::numbers::pi * t.wavenumber * z / L) - 1.0);
}

inline double wavy_slope(const WavyTransform& t, double L, double z) {
    const double k = 2.0 * std::numbers::pi * t.wavenumber / L;
    return -t.amplitude * k * std::sin(k * z);
}

/// Largest amplitude whose steepest wall slope stays at the overhang limit:
/// A_max = L tan(limit) / (2 pi n).
inline double wavy_max_amplitude(int wavenumber, double L, double overhang_limit_deg = default_overhang_limit_deg) {
    if (wavenumber < 1) throw GeometryError("wavy_max_amplitude: wavenumber must be >= 1");
    if (!(L > 0.0)) throw GeometryError("wavy_max_amplitude: L must be positive");
    if (!(overhang_limit_deg > 0.0 && overhang_limit_deg < 90.0))
        throw GeometryError("wavy_max_amplitude: limit must lie in (0, 90) degrees");
    return L * std::tan(deg_to_rad(overhang_limit_deg)) / (2.0 * std::numbers::pi * wavenumber);
}

/// Mean of sqrt(1 + f'(z)^2) over [0, L]. For integer wavenumbers the mean
/// over the core equals the mean over one period of sqrt(1 + s^2 sin^2 u),
/// s = max slope, which the periodic trapezoid rule integrates to round-off.
inline double arc_length_factor(const WavyTransform& t, double L) {
    t.validate();
    if (!(L > 0.0)) throw GeometryError("arc_length_factor: L must be positive");
    if (t.is_straight()) return 1.0;

    const double s2 = std::pow(t.max_slope(L), 2);
    constexpr int points = 1024;
    double sum = 0.0;
    for (int k = 0; k < points; ++k) {
        const double sn = std::sin(2.0 * std::numbers::pi * k / points);
        sum += std::sqrt(1.0 + s2 * sn * sn);
    }
    return std::max(1.0, sum / points);
}

// ---------------------------------------------------------------------------
// Channel metrics
// ---------------------------------------------------------------------------

/// Trapezoidal approximation of an annular-sector duct after removing one
/// wall thickness from each pitch.
struct SectorMetrics {
    double clear_radial = 0.0;
    double clear_arc = 0.0;
    double flow_area = 0.0;
    double wetted_perimeter = 0.0;
    double hydraulic_diameter = 0.0;
    double aspect_ratio = 0.0;  // clear radial / clear mean arc
};

inline SectorMetrics sector_metrics(double radial_pitch, double arc_pitch, double wall_allowance) {
    SectorMetrics m;
    m.clear_radial = radial_pitch - wall_allowance;
    m.clear_arc = arc_pitch - wall_allowance;
    if (!(m.clear_radial > 0.0) || !(m.clear_arc > 0.0)) {
        throw GeometryError("channel metrics: wall allowance " + std::to_string(wall_allowance) +
                            " m exceeds channel pitch (" + std::to_string(radial_pitch) + " x " +
                            std::to_string(arc_pitch) + " m)");
    }
    m.flow_area = m.clear_radial * m.clear_arc;
    m.wetted_perimeter = 2.0 * (m.clear_radial + m.clear_arc);
    m.hydraulic_diameter = 4.0 * m.flow_area / m.wetted_perimeter;
    m.aspect_ratio = m.clear_radial / m.clear_arc;
    return m;
}

struct Channel {
    ChannelIndex index;
    Fluid fluid = Fluid::air;
    double radial_pitch = 0.0;
    double arc_pitch = 0.0;
    double clear_radial = 0.0;
    double clear_arc = 0.0;
    double flow_area = 0.0;
    double wetted_perimeter = 0.0;
    double hydraulic_diameter = 0.0;
    double aspect_ratio = 0.0;
    std::vector<SharedWall> shared_walls;
    double path_length_factor = 1.0;
};

inline Channel channel_metrics(const CheckerboardLayout& layout, ChannelIndex index, const WavyTransform& transform) {
    const ChannelCell& cell = layout.at(index);
    const SectorMetrics m = sector_metrics(cell.radial_pitch(), cell.arc_pitch(), layout.annulus.wall_thickness);
    Channel ch;
    ch.index = cell.index;
    ch.fluid = cell.fluid;
    ch.radial_pitch = cell.radial_pitch();
    ch.arc_pitch = cell.arc_pitch();
    ch.clear_radial = m.clear_radial;
    ch.clear_arc = m.clear_arc;
    ch.flow_area = m.flow_area;
    ch.wetted_perimeter = m.wetted_perimeter;
    ch.hydraulic_diameter = m.hydraulic_diameter;
    ch.aspect_ratio = m.aspect_ratio;
    ch.shared_walls = cell.shared_walls;
    ch.path_length_factor = arc_length_factor(transform, layout.annulus.core_length);
    return ch;
}

inline std::vector<Channel> all_channel_metrics(const CheckerboardLayout& layout, const WavyTransform& transform) {
    std::vector<Channel> out;
    out.reserve(layout.channels.size());
    for (const auto& cell : layout.channels) out.push_back(channel_metrics(layout, cell.index, transform));
    return out;
}

// ---------------------------------------------------------------------------
// Manufacturability
// ---------------------------------------------------------------------------

struct ManufacturabilityLimits {
    double min_channel_thickness = 0.005;  // m
    double min_wall_thickness = 0.002;     // m
    double length_tolerance = 1e-9;        // m
    double angle_tolerance_deg = 1e-9;
};

struct Violation {
    std::string constraint;  // "channel_thickness", "wall_thickness", "overhang"
    std::string location;
    double value = 0.0;
    double limit = 0.0;
};

struct ManufacturabilityReport {
    double min_channel_thickness = 0.0;
    double min_wall_thickness = 0.0;
    double max_overhang_angle = 0.0;  // degrees from the build axis
    std::vector<Violation> violations;
    bool pass = true;
};

inline ManufacturabilityReport check_manufacturability(const CheckerboardLayout& layout, const WavyTransform& transform,
                                                       const ManufacturabilityLimits& limits = {}) {
    ManufacturabilityReport report;
    const double wall = layout.annulus.wall_thickness;
    report.min_wall_thickness = wall;
    report.min_channel_thickness = std::numeric_limits<double>::infinity();

    // Channels in one row share their cross-section, so violations are reported per row.
    for (int i = 0; i < layout.n_radial; ++i) {
        const ChannelCell& cell = layout.at({i, 0});
        const double clear_radial = cell.radial_pitch() - wall;
        const double clear_arc = cell.arc_pitch() - wall;
        report.min_channel_thickness = std::min({report.min_channel_thickness, clear_radial, clear_arc});
        const std::string row = "row " + std::to_string(i) + " (" + std::to_string(layout.m_azimuthal) + " channels)";
        if (clear_radial < limits.min_channel_thickness - limits.length_tolerance) {
            report.violations.push_back({"channel_thickness", row + " radial", clear_radial, limits.min_channel_thickness});
        }
        if (clear_arc < limits.min_channel_thickness - limits.length_tolerance) {
            report.violations.push_back({"channel_thickness", row + " azimuthal", clear_arc, limits.min_channel_thickness});
        }
    }
    if (wall < limits.min_wall_thickness - limits.length_tolerance) {
        report.violations.push_back({"wall_thickness", "all walls", wall, limits.min_wall_thickness});
    }

    const double L = layout.annulus.core_length;
    report.max_overhang_angle = rad_to_deg(std::atan(transform.max_slope(L)));
    if (report.max_overhang_angle > transform.overhang_limit_deg + limits.angle_tolerance_deg) {
        report.violations.push_back({"overhang", "wavy walls (n=" + std::to_string(transform.wavenumber) + ")",
                                     report.max_overhang_angle, transform.overhang_limit_deg});
    }
    if (transform.wavenumber < 1 || transform.wavenumber > max_wavenumber) {
        report.violations.push_back({"wavenumber", "wavy transform", static_cast<double>(transform.wavenumber),
                                     static_cast<double>(max_wavenumber)});
    }
    report.pass = report.violations.empty();
    return report;
}

}  // namespace recup
