#pragma once

/**
 * @file solver.hpp
 * @brief Reduced-order steady conjugate heat-transfer solver for the
 *        checkerboard counterflow core.
 *
 * Every channel is a 1D stream discretised into axial segments. Air marches
 * in +z, gas in -z. Each shared wall segment couples an air and a gas
 * segment through three series resistances (air film, wall conduction, gas
 * film). The segment energy balance is trapezoidal in the stream
 * temperature (second order in the segment length) and is solved for the
 * outlet node by Newton iteration on the Janaf enthalpy.
 *
 * Outer loop: Gauss-Seidel sweeps (all air channels, then all gas channels)
 * with under-relaxed temperature updates, re-distributing flow over the
 * parallel channels of each half and refreshing wall temperatures every
 * sweep. The core is printed in two halves joined by collectors; streams mix
 * (enthalpy-conserving) at the junction and the halves are solved together.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "recup/correlations.hpp"
#include "recup/geometry.hpp"
#include "recup/properties.hpp"

namespace recup {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InfeasibleLayoutError : public SolverError {
public:
    InfeasibleLayoutError(const std::string& what, ManufacturabilityReport r)
        : SolverError(what), report(std::move(r)) {}
    ManufacturabilityReport report;
};

struct BoundaryConditions {
    double air_inlet_temperature = 303.15;   // K (30 °C)
    double gas_inlet_temperature = 1233.15;  // K (960 °C)
    double air_flow_nm3h = 34.0;
    double gas_flow_nm3h = 37.0;
    double air_inlet_pressure = normal_pressure;
    double gas_inlet_pressure = normal_pressure;

    void validate() const {
        if (!(gas_inlet_temperature > air_inlet_temperature))
            throw std::invalid_argument("boundary conditions: gas inlet must be hotter than air inlet");
        if (!(air_flow_nm3h > 0.0) || !(gas_flow_nm3h > 0.0))
            throw std::invalid_argument("boundary conditions: flows must be positive");
        if (!(air_inlet_pressure > 0.0) || !(gas_inlet_pressure > 0.0))
            throw std::invalid_argument("boundary conditions: pressures must be positive");
    }
};

struct SolverConfig {
    int segments = 200;               // per half
    double tolerance = 1e-4;          // K, max nodal temperature residual
    double energy_tolerance = 1e-7;   // relative |q_air - q_gas| / q required for convergence
    int max_iterations = 500;
    double relaxation = 0.7;
    double flow_tolerance = 1e-6;     // relative pressure-drop imbalance between parallel channels
    double nu_enhancement = 1.0;      // multiplier on Nu
    bool adiabatic = false;
    std::optional<double> prescribed_u;  // W/(m2 K) on every shared wall, bypasses the resistance model
    bool allow_infeasible = false;
    bool strict_laminar = false;      // throw instead of flagging when the converged state reaches Re >= 2300
    int halves = 2;

    void validate() const {
        if (segments < 1) throw std::invalid_argument("solver config: segments must be >= 1");
        if (!(tolerance > 0.0)) throw std::invalid_argument("solver config: tolerance must be positive");
        if (!(energy_tolerance > 0.0)) throw std::invalid_argument("solver config: energy tolerance must be positive");
        if (max_iterations < 1) throw std::invalid_argument("solver config: max_iterations must be >= 1");
        if (!(relaxation > 0.0 && relaxation <= 1.0)) throw std::invalid_argument("solver config: relaxation must lie in (0, 1]");
        if (!(flow_tolerance > 0.0)) throw std::invalid_argument("solver config: flow tolerance must be positive");
        if (!(nu_enhancement >= 0.0)) throw std::invalid_argument("solver config: Nu enhancement must be >= 0");
        if (prescribed_u && !(*prescribed_u >= 0.0)) throw std::invalid_argument("solver config: prescribed U must be >= 0");
        if (halves < 1) throw std::invalid_argument("solver config: halves must be >= 1");
    }
};

// ---------------------------------------------------------------------------
// Building blocks
// ---------------------------------------------------------------------------

/// h = Nu k_f / D_h at bulk temperature T; throws OutOfModelError outside the laminar regime.
inline double convective_coefficient(const Channel& channel, const FluidModel& model, double T, double reynolds,
                                     double prandtl, double enhancement = 1.0) {
    return enhancement * nusselt(channel, reynolds) * fluid_conductivity(model, T, prandtl) / channel.hydraulic_diameter;
}

inline double reynolds_number(const Channel& channel, const FluidModel& model, double mass_flow, double T) {
    return mass_flow * channel.hydraulic_diameter / (channel.flow_area * viscosity(model, T));
}

struct WallSegment {
    double area = 0.0;          // m2, heat-transfer area on each face
    double thickness = 0.0;     // m
    double conductivity = 0.0;  // W/(m K)
};

/// 1/UA = 1/(h_hot A) + t/(k A) + 1/(h_cold A). A zero film coefficient
/// means no exchange.
inline double segment_conductance(double h_hot, double h_cold, const WallSegment& wall) {
    if (!(wall.area > 0.0)) throw std::invalid_argument("segment_conductance: area must be positive");
    if (h_hot <= 0.0 || h_cold <= 0.0) return 0.0;
    double resistance = 1.0 / (h_hot * wall.area) + 1.0 / (h_cold * wall.area);
    if (wall.thickness > 0.0) {
        if (!(wall.conductivity > 0.0)) throw std::invalid_argument("segment_conductance: wall conductivity must be positive");
        resistance += wall.thickness / (wall.conductivity * wall.area);
    }
    return 1.0 / resistance;
}

/// Conductance between a hot and a cold channel segment sharing a wall;
/// properties at the segment bulk temperatures, k_s at the wall temperature.
inline double segment_conductance(const Channel& hot, const FluidModel& hot_model, double T_hot, double Re_hot,
                                  const Channel& cold, const FluidModel& cold_model, double T_cold, double Re_cold,
                                  double T_wall, double area, double wall_thickness, const PropertySet& props,
                                  double enhancement = 1.0) {
    const double h_hot = convective_coefficient(hot, hot_model, T_hot, Re_hot, props.prandtl, enhancement);
    const double h_cold = convective_coefficient(cold, cold_model, T_cold, Re_cold, props.prandtl, enhancement);
    return segment_conductance(h_hot, h_cold, {area, wall_thickness, solid_conductivity(props.solid, T_wall)});
}

/// Laminar hydraulic resistance R = dp / mdot of one channel (Pa s / kg),
/// from segment-mean temperatures and pressures.
inline double hydraulic_resistance(const Channel& channel, const FluidModel& model, std::span<const double> node_temperature,
                                   std::span<const double> node_pressure, double segment_length) {
    if (node_temperature.size() < 2 || node_pressure.size() != node_temperature.size())
        throw std::invalid_argument("hydraulic_resistance: inconsistent node arrays");
    const double fre = poiseuille_number(channel.aspect_ratio);
    const double dl = segment_length * channel.path_length_factor;
    const double geom = 2.0 * channel.flow_area * channel.hydraulic_diameter * channel.hydraulic_diameter;
    double r = 0.0;
    for (std::size_t k = 0; k + 1 < node_temperature.size(); ++k) {
        const double T = 0.5 * (node_temperature[k] + node_temperature[k + 1]);
        const double p = 0.5 * (node_pressure[k] + node_pressure[k + 1]);
        r += fre * viscosity(model, T) * dl / (density(model, p, T) * geom);
    }
    return r;
}

struct FlowDistribution {
    std::vector<double> mass_flow;      // kg/s per channel, same order as the input
    std::vector<double> pressure_drop;  // Pa per channel
    double pressure_drop_common = 0.0;  // flow-weighted
    double imbalance = 0.0;             // max |dp_c - dp| / dp
};

/// Splits a total flow over parallel channels so that all channels see the
/// same pressure drop. Laminar dp is linear in mdot at frozen properties, so
/// the equal-dp split is mdot_c proportional to 1/R_c.
inline FlowDistribution distribute_flow(std::span<const double> resistance, double total_mass_flow,
                                        double tolerance = 1e-6) {
    if (resistance.empty()) throw SolverError("distribute_flow: no channels for this fluid");
    if (!(total_mass_flow > 0.0)) throw SolverError("distribute_flow: total mass flow must be positive");
    double total_conductance = 0.0;
    for (double r : resistance) {
        if (!(r > 0.0) || !std::isfinite(r)) throw SolverError("distribute_flow: non-positive hydraulic resistance");
        total_conductance += 1.0 / r;
    }
    FlowDistribution out;
    out.mass_flow.resize(resistance.size());
    out.pressure_drop.resize(resistance.size());
    double weighted = 0.0;
    for (std::size_t c = 0; c < resistance.size(); ++c) {
        out.mass_flow[c] = total_mass_flow * (1.0 / resistance[c]) / total_conductance;
        out.pressure_drop[c] = out.mass_flow[c] * resistance[c];
        weighted += out.mass_flow[c] * out.pressure_drop[c];
    }
    out.pressure_drop_common = weighted / total_mass_flow;
    for (double dp : out.pressure_drop) {
        out.imbalance = std::max(out.imbalance, std::abs(dp - out.pressure_drop_common) / out.pressure_drop_common);
    }
    if (out.imbalance > tolerance) {
        throw SolverError("distribute_flow: pressure-drop imbalance " + std::to_string(out.imbalance) +
                          " exceeds tolerance");
    }
    return out;
}

/// Distribution over the channels of one fluid of a layout, using per-channel
/// node temperature profiles (one vector per channel of that fluid, in
/// layout order).
inline FlowDistribution distribute_flow(const std::vector<Channel>& channels, Fluid fluid, double total_mass_flow,
                                        const std::vector<std::vector<double>>& temperature_field,
                                        const FluidModel& model, double segment_length,
                                        double pressure = normal_pressure, double tolerance = 1e-6) {
    std::vector<double> resistance;
    std::size_t k = 0;
    for (const auto& ch : channels) {
        if (ch.fluid != fluid) continue;
        if (k >= temperature_field.size()) throw SolverError("distribute_flow: temperature field too short");
        const auto& T = temperature_field[k++];
        const std::vector<double> p(T.size(), pressure);
        resistance.push_back(hydraulic_resistance(ch, model, T, p, segment_length));
    }
    return distribute_flow(resistance, total_mass_flow, tolerance);
}

// Inverse of enthalpy(model, T, T_ref) by Newton iteration.
inline double temperature_from_enthalpy(const FluidModel& model, double dh, double T_ref, double guess) {
    double T = guess;
    for (int it = 0; it < 50; ++it) {
        const double step = (enthalpy(model, T, T_ref) - dh) / cp(model, T);
        T = std::clamp(T - step, model.validity.lo, model.validity.hi);
        if (std::abs(step) <= 1e-13 * T) break;
    }
    return T;
}

// ---------------------------------------------------------------------------
// Result types
// ---------------------------------------------------------------------------

struct ChannelOutlet {
    std::size_t channel_id = 0;
    Fluid fluid = Fluid::air;
    double mass_flow = 0.0;     // kg/s
    double temperature = 0.0;   // K
    double pressure_drop = 0.0; // Pa, inlet to outlet over all halves
};

/// Axial state of one half. Node arrays are row-major [channel][node],
/// nodes k = 0..segments at z_k = k L / segments; wall arrays are
/// [wall link][segment].
struct SegmentState {
    int segments = 0;
    std::vector<double> temperature;
    std::vector<double> pressure;
    std::vector<double> mass_flow;          // per channel
    std::vector<double> wall_temperature;
    std::vector<double> heat_flux;          // W/m2, gas to air positive

    double node_temperature(std::size_t channel, int node) const {
        return temperature[channel * static_cast<std::size_t>(segments + 1) + static_cast<std::size_t>(node)];
    }
};

struct WallLink {
    std::size_t air = 0;
    std::size_t gas = 0;
    double width = 0.0;
};

struct SimulationResult {
    std::string layout_id;
    int n_radial = 0;
    int m_azimuthal = 0;
    int wavenumber = 0;
    double amplitude = 0.0;
    double q_scale = 1.0;

    double air_inlet_temperature = 0.0;
    double gas_inlet_temperature = 0.0;
    double air_outlet_temperature = 0.0;  // flow-weighted, K
    double gas_outlet_temperature = 0.0;
    double air_mass_flow = 0.0;           // kg/s
    double gas_mass_flow = 0.0;
    double dp_air = 0.0;                  // Pa
    double dp_gas = 0.0;
    double dp_mean = 0.0;
    double heat_to_air = 0.0;             // W
    double heat_from_gas = 0.0;
    double exchanged_heat = 0.0;
    double energy_imbalance = 0.0;
    double total_conductance = 0.0;       // sum of segment UA, W/K
    double min_temperature = 0.0;
    double max_temperature = 0.0;
    double max_reynolds = 0.0;
    bool laminar_limit_exceeded = false;  // some segment reached Re >= 2300

    std::vector<ChannelOutlet> outlets;
    std::vector<std::vector<double>> channel_mass_flows;  // [half][channel]
    std::vector<double> residual_history;
    std::vector<SegmentState> halves;
    std::vector<WallLink> walls;
    int iterations = 0;
    bool converged = false;
};

/// Mass-flow weighted outlet temperature over one fluid's channels.
inline double outlet_temperature(const SimulationResult& result, Fluid fluid) {
    double m = 0.0;
    double mt = 0.0;
    for (const auto& o : result.outlets) {
        if (o.fluid != fluid) continue;
        m += o.mass_flow;
        mt += o.mass_flow * o.temperature;
    }
    if (m <= 0.0) return fluid == Fluid::air ? result.air_inlet_temperature : result.gas_inlet_temperature;
    return mt / m;
}

inline double mean_pressure_drop(const SimulationResult& result) { return 0.5 * (result.dp_air + result.dp_gas); }

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

namespace detail {

class CounterflowNetwork {
public:
    CounterflowNetwork(const CheckerboardLayout& layout, const WavyTransform& transform, const BoundaryConditions& bc,
                       const SolverConfig& config, const PropertySet& props)
        : layout_(layout), bc_(bc), config_(config), props_(props),
          channels_(all_channel_metrics(layout, transform)),
          segments_(config.segments),
          nodes_(static_cast<std::size_t>(config.segments) + 1),
          dz_(layout.annulus.core_length / config.segments) {
        for (std::size_t c = 0; c < channels_.size(); ++c) {
            (channels_[c].fluid == Fluid::air ? air_ids_ : gas_ids_).push_back(c);
        }
        if (air_ids_.empty() || gas_ids_.empty()) throw SolverError("solve: layout needs at least one air and one gas channel");

        for (const auto& ch : channels_) nu_.push_back(laminar_nusselt(ch.aspect_ratio));
        links_of_.resize(channels_.size());
        for (std::size_t a : air_ids_) {
            for (const auto& w : channels_[a].shared_walls) {
                if (channels_[w.neighbor_id].fluid != Fluid::gas) throw SolverError("solve: checkerboard parity broken");
                links_of_[a].push_back(walls_.size());
                links_of_[w.neighbor_id].push_back(walls_.size());
                walls_.push_back({a, w.neighbor_id, w.width});
            }
        }

        air_mass_ = normal_flow_to_mass(bc.air_flow_nm3h, props.air);
        gas_mass_ = normal_flow_to_mass(bc.gas_flow_nm3h, props.gas);

        const std::size_t halves = static_cast<std::size_t>(config.halves);
        state_.resize(halves);
        h_film_.assign(halves, std::vector<double>(channels_.size() * segments_, 0.0));
        ua_.assign(halves, std::vector<double>(walls_.size() * segments_, 0.0));
        resistance_.assign(halves, std::vector<double>(channels_.size(), 0.0));
        dp_channel_.assign(halves, std::vector<double>(channels_.size(), 0.0));
        for (auto& s : state_) {
            s.segments = segments_;
            s.temperature.resize(channels_.size() * nodes_);
            s.pressure.resize(channels_.size() * nodes_);
            s.mass_flow.resize(channels_.size());
            s.wall_temperature.assign(walls_.size() * segments_, 0.5 * (bc.air_inlet_temperature + bc.gas_inlet_temperature));
            s.heat_flux.assign(walls_.size() * segments_, 0.0);
            for (std::size_t c = 0; c < channels_.size(); ++c) {
                const bool air = channels_[c].fluid == Fluid::air;
                std::fill_n(s.temperature.begin() + static_cast<std::ptrdiff_t>(c * nodes_), nodes_,
                            air ? bc.air_inlet_temperature : bc.gas_inlet_temperature);
                std::fill_n(s.pressure.begin() + static_cast<std::ptrdiff_t>(c * nodes_), nodes_,
                            air ? bc.air_inlet_pressure : bc.gas_inlet_pressure);
                s.mass_flow[c] = (air ? air_mass_ / static_cast<double>(air_ids_.size())
                                      : gas_mass_ / static_cast<double>(gas_ids_.size()));
            }
        }
    }

    SimulationResult run() {
        SimulationResult result;
        bool converged = false;
        int iteration = 0;
        double residual = std::numeric_limits<double>::infinity();
        for (iteration = 1; iteration <= config_.max_iterations; ++iteration) {
            for (std::size_t h = 0; h < state_.size(); ++h) update_hydraulics(h);
            for (std::size_t h = 0; h < state_.size(); ++h) update_conductances(h);
            residual = 0.0;
            residual = std::max(residual, march(Fluid::air));
            residual = std::max(residual, march(Fluid::gas));
            for (std::size_t h = 0; h < state_.size(); ++h) update_walls(h);
            check_second_law(iteration);
            result.residual_history.push_back(residual);
            if (residual <= config_.tolerance && energy_imbalance() <= config_.energy_tolerance) {
                converged = true;
                break;
            }
        }
        for (std::size_t h = 0; h < state_.size(); ++h) update_hydraulics(h);
        if (config_.strict_laminar && max_reynolds_ >= laminar_reynolds_limit) {
            throw OutOfModelError("solve: converged state reaches Re = " + std::to_string(max_reynolds_) +
                                  ", outside the laminar model (Re < 2300)");
        }
        fill_result(result);
        result.iterations = std::min(iteration, config_.max_iterations);
        result.converged = converged;
        return result;
    }

private:
    double* temps(std::size_t h, std::size_t c) { return state_[h].temperature.data() + c * nodes_; }
    double* press(std::size_t h, std::size_t c) { return state_[h].pressure.data() + c * nodes_; }

    const FluidModel& model(std::size_t c) const { return channels_[c].fluid == Fluid::air ? props_.air : props_.gas; }

    // Flow split, pressure profiles and film coefficients for half h.
    void update_hydraulics(std::size_t h) {
        auto& s = state_[h];
        if (h == 0) max_reynolds_ = 0.0;
        for (std::size_t c = 0; c < channels_.size(); ++c) {
            resistance_[h][c] = hydraulic_resistance(channels_[c], model(c), {temps(h, c), nodes_}, {press(h, c), nodes_}, dz_);
        }
        for (Fluid f : {Fluid::air, Fluid::gas}) {
            const auto& ids = f == Fluid::air ? air_ids_ : gas_ids_;
            std::vector<double> r;
            r.reserve(ids.size());
            for (std::size_t c : ids) r.push_back(resistance_[h][c]);
            const FlowDistribution dist = distribute_flow(r, f == Fluid::air ? air_mass_ : gas_mass_, config_.flow_tolerance);
            for (std::size_t k = 0; k < ids.size(); ++k) {
                s.mass_flow[ids[k]] = dist.mass_flow[k];
                dp_channel_[h][ids[k]] = dist.pressure_drop[k];
            }
        }

        // Pressures, lagged: inlet pressure of this half is the outlet of the upstream half.
        for (std::size_t c = 0; c < channels_.size(); ++c) {
            const bool air = channels_[c].fluid == Fluid::air;
            const double inlet = inlet_pressure(h, air);
            const double per_segment = dp_channel_[h][c] / segments_;
            double* p = press(h, c);
            for (int k = 0; k <= segments_; ++k) {
                const int from_inlet = air ? k : segments_ - k;
                p[k] = inlet - per_segment * from_inlet;
            }
        }

        // Film coefficients per channel segment (laminar check included).
        for (std::size_t c = 0; c < channels_.size(); ++c) {
            const Channel& ch = channels_[c];
            const double* T = temps(h, c);
            for (int k = 0; k < segments_; ++k) {
                const double Tm = 0.5 * (T[k] + T[k + 1]);
                const double re = reynolds_number(ch, model(c), s.mass_flow[c], Tm);
                max_reynolds_ = std::max(max_reynolds_, re);
                h_film_[h][c * segments_ + static_cast<std::size_t>(k)] =
                    config_.prescribed_u ? 0.0
                                         : config_.nu_enhancement * nu_[c] * fluid_conductivity(model(c), Tm, props_.prandtl) /
                                               ch.hydraulic_diameter;
            }
        }
    }

    double inlet_pressure(std::size_t h, bool air) const {
        const std::size_t halves = state_.size();
        double p = air ? bc_.air_inlet_pressure : bc_.gas_inlet_pressure;
        if (air) {
            for (std::size_t u = 0; u < h; ++u) p -= common_dp(u, Fluid::air);
        } else {
            for (std::size_t u = halves - 1; u > h; --u) p -= common_dp(u, Fluid::gas);
        }
        return p;
    }

    double common_dp(std::size_t h, Fluid f) const {
        const auto& ids = f == Fluid::air ? air_ids_ : gas_ids_;
        double m = 0.0;
        double mdp = 0.0;
        for (std::size_t c : ids) {
            m += state_[h].mass_flow[c];
            mdp += state_[h].mass_flow[c] * dp_channel_[h][c];
        }
        return mdp / m;
    }

    double wall_area() const { return dz_ * channels_.front().path_length_factor; }

    void update_conductances(std::size_t h) {
        const auto& s = state_[h];
        const double len = wall_area();
        for (std::size_t w = 0; w < walls_.size(); ++w) {
            const WallLink& link = walls_[w];
            for (int k = 0; k < segments_; ++k) {
                const std::size_t ws = w * segments_ + static_cast<std::size_t>(k);
                const double area = link.width * len;
                double ua = 0.0;
                if (config_.adiabatic) {
                    ua = 0.0;
                } else if (config_.prescribed_u) {
                    ua = *config_.prescribed_u * area;
                } else {
                    const double h_air = h_film_[h][link.air * segments_ + static_cast<std::size_t>(k)];
                    const double h_gas = h_film_[h][link.gas * segments_ + static_cast<std::size_t>(k)];
                    const double k_wall = solid_conductivity(props_.solid, s.wall_temperature[ws]);
                    ua = segment_conductance(h_gas, h_air, {area, layout_.annulus.wall_thickness, k_wall});
                }
                ua_[h][ws] = ua;
            }
        }
    }

    // One Gauss-Seidel pass over all channels of one fluid through every half
    // in flow order. Returns the largest unrelaxed nodal change.
    double march(Fluid fluid) {
        const bool air = fluid == Fluid::air;
        const auto& ids = air ? air_ids_ : gas_ids_;
        const FluidModel& fm = air ? props_.air : props_.gas;
        const std::size_t halves = state_.size();
        const double total_mass = air ? air_mass_ : gas_mass_;
        double inlet = air ? bc_.air_inlet_temperature : bc_.gas_inlet_temperature;
        double residual = 0.0;
        std::vector<double> fresh(nodes_);

        for (std::size_t step = 0; step < halves; ++step) {
            const std::size_t h = air ? step : halves - 1 - step;
            const auto& s = state_[h];
            for (std::size_t c : ids) {
                double* T = temps(h, c);
                const double mdot = s.mass_flow[c];
                const int first = air ? 0 : segments_;
                const int dir = air ? 1 : -1;
                fresh[static_cast<std::size_t>(first)] = inlet;
                for (int n = 0; n < segments_; ++n) {
                    const int k_in = first + dir * n;
                    const int k_out = k_in + dir;
                    const int seg = std::min(k_in, k_out);
                    double g = 0.0;
                    double s_nb = 0.0;
                    for (std::size_t w : links_of_[c]) {
                        const double ua = ua_[h][w * segments_ + static_cast<std::size_t>(seg)];
                        if (ua == 0.0) continue;
                        const std::size_t nb = air ? walls_[w].gas : walls_[w].air;
                        const double* Tn = temps(h, nb);
                        g += ua;
                        s_nb += ua * 0.5 * (Tn[seg] + Tn[seg + 1]);
                    }
                    fresh[static_cast<std::size_t>(k_out)] =
                        segment_outlet(fm, mdot, fresh[static_cast<std::size_t>(k_in)], g, s_nb);
                }
                for (std::size_t k = 0; k < nodes_; ++k) {
                    const double change = fresh[k] - T[k];
                    residual = std::max(residual, std::abs(change));
                    T[k] += config_.relaxation * change;
                }
                T[first] = inlet;
            }
            // Enthalpy-conserving mixing in the collector feeding the next half.
            const int outlet_node = air ? segments_ : 0;
            double mh = 0.0;
            double mt = 0.0;
            for (std::size_t c : ids) {
                const double T_out = temps(h, c)[outlet_node];
                mh += s.mass_flow[c] * enthalpy(fm, T_out, inlet);
                mt += s.mass_flow[c] * T_out;
            }
            inlet = temperature_from_enthalpy(fm, mh / total_mass, inlet, mt / total_mass);
        }
        return residual;
    }

    // Solves mdot (h(T) - h(T_in)) + g (T_in + T)/2 = s_nb for T.
    static double segment_outlet(const FluidModel& fm, double mdot, double T_in, double g, double s_nb) {
        if (g == 0.0) return T_in;
        const double target = s_nb - 0.5 * g * T_in;
        double T = T_in + (s_nb - g * T_in) / (mdot * cp(fm, T_in) + 0.5 * g);
        for (int it = 0; it < 30; ++it) {
            const double f = mdot * enthalpy(fm, T, T_in) + 0.5 * g * T - target;
            const double step = f / (mdot * cp(fm, T) + 0.5 * g);
            T -= step;
            if (std::abs(step) <= 1e-12 * T) break;
        }
        return T;
    }

    void update_walls(std::size_t h) {
        auto& s = state_[h];
        const double len = wall_area();
        for (std::size_t w = 0; w < walls_.size(); ++w) {
            const WallLink& link = walls_[w];
            const double* Ta = temps(h, link.air);
            const double* Tg = temps(h, link.gas);
            for (int k = 0; k < segments_; ++k) {
                const std::size_t ws = w * segments_ + static_cast<std::size_t>(k);
                const double area = link.width * len;
                const double ta = 0.5 * (Ta[k] + Ta[k + 1]);
                const double tg = 0.5 * (Tg[k] + Tg[k + 1]);
                const double q = ua_[h][ws] * (tg - ta);
                s.heat_flux[ws] = q / area;
                const double h_gas = h_film_[h][link.gas * segments_ + static_cast<std::size_t>(k)];
                if (config_.adiabatic || config_.prescribed_u || h_gas <= 0.0) {
                    s.wall_temperature[ws] = 0.5 * (ta + tg);
                } else {
                    const double k_wall = solid_conductivity(props_.solid, s.wall_temperature[ws]);
                    const double tw = tg - q * (1.0 / (h_gas * area) + 0.5 * layout_.annulus.wall_thickness / (k_wall * area));
                    s.wall_temperature[ws] = std::clamp(tw, ta, tg);
                }
            }
        }
    }

    void check_second_law(int iteration) const {
        const double lo = bc_.air_inlet_temperature - 1e-6;
        const double hi = bc_.gas_inlet_temperature + 1e-6;
        for (std::size_t h = 0; h < state_.size(); ++h) {
            for (std::size_t c = 0; c < channels_.size(); ++c) {
                const double* T = state_[h].temperature.data() + c * nodes_;
                for (std::size_t k = 0; k < nodes_; ++k) {
                    if (!(T[k] >= lo && T[k] <= hi)) {
                        throw SolverError("solve: second-law violation at iteration " + std::to_string(iteration) +
                                          ", half " + std::to_string(h) + ", channel (" +
                                          std::to_string(channels_[c].index.radial) + "," +
                                          std::to_string(channels_[c].index.azimuthal) + "), node " + std::to_string(k) +
                                          ": T = " + std::to_string(T[k]) + " K outside [" + std::to_string(lo) + ", " +
                                          std::to_string(hi) + "] K");
                    }
                }
            }
        }
    }

    double stream_heat(Fluid fluid) const {
        const bool air = fluid == Fluid::air;
        const auto& ids = air ? air_ids_ : gas_ids_;
        const FluidModel& fm = air ? props_.air : props_.gas;
        const double ref = air ? bc_.air_inlet_temperature : bc_.gas_inlet_temperature;
        double q = 0.0;
        for (std::size_t h = 0; h < state_.size(); ++h) {
            for (std::size_t c : ids) {
                const double* T = state_[h].temperature.data() + c * nodes_;
                const double t_in = air ? T[0] : T[segments_];
                const double t_out = air ? T[segments_] : T[0];
                q += state_[h].mass_flow[c] * (enthalpy(fm, t_out, ref) - enthalpy(fm, t_in, ref));
            }
        }
        return air ? q : -q;
    }

    double energy_imbalance() const {
        const double qa = stream_heat(Fluid::air);
        const double qg = stream_heat(Fluid::gas);
        const double scale = std::max(std::abs(qa), std::abs(qg));
        return scale > 0.0 ? std::abs(qa - qg) / scale : 0.0;
    }

    void fill_result(SimulationResult& r) {
        const std::size_t halves = state_.size();
        r.layout_id = layout_.name();
        r.n_radial = layout_.n_radial;
        r.m_azimuthal = layout_.m_azimuthal;
        r.q_scale = layout_.q_scale;
        r.air_inlet_temperature = bc_.air_inlet_temperature;
        r.gas_inlet_temperature = bc_.gas_inlet_temperature;
        r.air_mass_flow = air_mass_;
        r.gas_mass_flow = gas_mass_;

        for (Fluid f : {Fluid::air, Fluid::gas}) {
            const bool air = f == Fluid::air;
            const std::size_t last = air ? halves - 1 : 0;
            const int outlet_node = air ? segments_ : 0;
            for (std::size_t c : air ? air_ids_ : gas_ids_) {
                double dp = 0.0;
                for (std::size_t h = 0; h < halves; ++h) dp += dp_channel_[h][c];
                r.outlets.push_back({c, f, state_[last].mass_flow[c], state_[last].temperature[c * nodes_ + static_cast<std::size_t>(outlet_node)], dp});
            }
            double dp_fluid = 0.0;
            for (std::size_t h = 0; h < halves; ++h) dp_fluid += common_dp(h, f);
            (air ? r.dp_air : r.dp_gas) = dp_fluid;
        }
        r.air_outlet_temperature = outlet_temperature(r, Fluid::air);
        r.gas_outlet_temperature = outlet_temperature(r, Fluid::gas);
        r.dp_mean = mean_pressure_drop(r);
        r.heat_to_air = stream_heat(Fluid::air);
        r.heat_from_gas = stream_heat(Fluid::gas);
        r.exchanged_heat = 0.5 * (r.heat_to_air + r.heat_from_gas);
        r.energy_imbalance = energy_imbalance();
        r.max_reynolds = max_reynolds_;
        r.laminar_limit_exceeded = max_reynolds_ >= laminar_reynolds_limit;

        r.total_conductance = 0.0;
        for (const auto& ua : ua_) r.total_conductance += std::accumulate(ua.begin(), ua.end(), 0.0);
        r.min_temperature = std::numeric_limits<double>::infinity();
        r.max_temperature = -std::numeric_limits<double>::infinity();
        for (const auto& s : state_) {
            for (double t : s.temperature) {
                r.min_temperature = std::min(r.min_temperature, t);
                r.max_temperature = std::max(r.max_temperature, t);
            }
            for (double t : s.wall_temperature) {
                r.min_temperature = std::min(r.min_temperature, t);
                r.max_temperature = std::max(r.max_temperature, t);
            }
            r.channel_mass_flows.push_back(s.mass_flow);
        }
        r.halves = state_;
        r.walls = walls_;
    }

    const CheckerboardLayout& layout_;
    BoundaryConditions bc_;
    SolverConfig config_;
    PropertySet props_;
    std::vector<Channel> channels_;
    std::vector<std::size_t> air_ids_;
    std::vector<std::size_t> gas_ids_;
    std::vector<WallLink> walls_;
    std::vector<std::vector<std::size_t>> links_of_;
    std::vector<double> nu_;
    double max_reynolds_ = 0.0;
    int segments_;
    std::size_t nodes_;
    double dz_;
    double air_mass_ = 0.0;
    double gas_mass_ = 0.0;
    std::vector<SegmentState> state_;
    std::vector<std::vector<double>> h_film_;
    std::vector<std::vector<double>> ua_;
    std::vector<std::vector<double>> resistance_;
    std::vector<std::vector<double>> dp_channel_;
};

}  // namespace detail

inline SimulationResult solve(const CheckerboardLayout& layout, const WavyTransform& transform,
                              const BoundaryConditions& bc = {}, const SolverConfig& config = {},
                              const PropertySet& props = {}) {
    bc.validate();
    config.validate();
    transform.validate();
    props.air.validate();
    props.gas.validate();
    if (!config.allow_infeasible) {
        ManufacturabilityReport report = check_manufacturability(layout, transform);
        if (!report.pass) {
            throw InfeasibleLayoutError("solve: layout " + layout.name() + " violates manufacturability constraints (" +
                                            std::to_string(report.violations.size()) + " violations)",
                                        std::move(report));
        }
    }
    detail::CounterflowNetwork network(layout, transform, bc, config, props);
    SimulationResult result = network.run();
    result.wavenumber = transform.wavenumber;
    result.amplitude = transform.amplitude;
    return result;
}

}  // namespace recup
