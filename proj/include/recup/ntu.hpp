#pragma once

/**
 * @file ntu.hpp
 * @brief Effectiveness-NTU analysis of counterflow operating points.
 *
 * Operating points come either from solver results or from four measured or
 * simulated stream temperatures plus the two normal flow rates.
 */

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "recup/properties.hpp"
#include "recup/solver.hpp"

namespace recup {

class NtuError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// C = mdot * mean cp, with the mean taken as an enthalpy difference quotient
/// (exact for the Janaf model). Falls back to cp at the mean temperature for
/// |dT| <= 0.1 K.
inline double heat_capacity_rate(const FluidModel& model, double mass_flow, double T_in, double T_out) {
    if (!(mass_flow > 0.0)) throw NtuError("heat_capacity_rate: mass flow must be positive");
    const double dT = T_out - T_in;
    if (std::abs(dT) > 0.1) return mass_flow * enthalpy(model, T_out, T_in) / dT;
    return mass_flow * cp(model, 0.5 * (T_in + T_out));
}

struct StreamTemperatures {
    double hot_in = 0.0;   // K
    double hot_out = 0.0;
    double cold_in = 0.0;
    double cold_out = 0.0;
};

struct NtuReport {
    double C_hot = 0.0;   // W/K
    double C_cold = 0.0;
    double C_min = 0.0;
    double C_max = 0.0;
    double C_star = 0.0;
    double q_hot = 0.0;   // W, C_h (T_h,i - T_h,o)
    double q_cold = 0.0;  // W, C_c (T_c,o - T_c,i)
    double q = 0.0;       // C_min-side balance
    double q_max = 0.0;
    double epsilon = 0.0;
    double NTU = 0.0;
    double UA = 0.0;
    double energy_imbalance = 0.0;
    bool cold_is_min = true;
};

/// q, q_max, epsilon and the side-balance imbalance; the C fields are filled
/// from the given rates.
inline NtuReport effectiveness(const StreamTemperatures& t, double C_hot, double C_cold) {
    if (!(t.hot_in > t.cold_in)) throw NtuError("effectiveness: hot inlet must exceed cold inlet");
    if (!(C_hot > 0.0) || !(C_cold > 0.0)) throw NtuError("effectiveness: heat capacity rates must be positive");
    const auto within = [&t](double T) { return T >= t.cold_in && T <= t.hot_in; };
    if (!within(t.hot_out) || !within(t.cold_out))
        throw NtuError("effectiveness: outlet temperatures outside [T_c,in, T_h,in] violate the second law");

    NtuReport r;
    r.C_hot = C_hot;
    r.C_cold = C_cold;
    r.cold_is_min = C_cold <= C_hot;
    r.C_min = std::min(C_hot, C_cold);
    r.C_max = std::max(C_hot, C_cold);
    r.C_star = r.C_min / r.C_max;
    r.q_hot = C_hot * (t.hot_in - t.hot_out);
    r.q_cold = C_cold * (t.cold_out - t.cold_in);
    r.q = r.cold_is_min ? r.q_cold : r.q_hot;
    r.q_max = r.C_min * (t.hot_in - t.cold_in);
    r.epsilon = r.q / r.q_max;
    const double scale = std::max(r.q_hot, r.q_cold);
    r.energy_imbalance = scale > 0.0 ? std::abs(r.q_hot - r.q_cold) / scale : 0.0;
    return r;
}

/// Counterflow relation eps(NTU, C*); C* = 1 uses the limit NTU / (1 + NTU).
inline double counterflow_epsilon(double ntu, double c_star) {
    if (!(ntu >= 0.0)) throw NtuError("counterflow_epsilon: NTU must be >= 0");
    if (!(c_star >= 0.0 && c_star <= 1.0)) throw NtuError("counterflow_epsilon: C* must lie in [0, 1]");
    if (std::isinf(ntu)) return 1.0;
    if (c_star == 1.0) return ntu / (1.0 + ntu);
    const double d = 1.0 - c_star;
    const double x = -ntu * d;
    const double em1 = std::expm1(x);  // e^x - 1
    // (1 - e^x) / (1 - C* e^x) with 1 - C* e^x = d - C* (e^x - 1)
    return -em1 / (d - c_star * em1);
}

/// Inverse of counterflow_epsilon in NTU.
inline double invert_ntu(double epsilon, double c_star) {
    if (!(c_star >= 0.0 && c_star <= 1.0)) throw NtuError("invert_ntu: C* must lie in [0, 1]");
    if (!(epsilon >= 0.0 && epsilon < 1.0))
        throw NtuError("invert_ntu: effectiveness " + std::to_string(epsilon) + " outside [0, 1)");
    if (c_star == 1.0) return epsilon / (1.0 - epsilon);
    const double d = 1.0 - c_star;
    // ln((1 - C* eps)/(1 - eps)) / (1 - C*) = log1p(eps d / (1 - eps)) / d
    return std::log1p(epsilon * d / (1.0 - epsilon)) / d;
}

/// How the two heat capacity rates of a tabulated operating point are
/// obtained.
enum class CapacityRateMode {
    /// Both streams: normal flow rate times enthalpy-mean cp of the property models.
    properties,
    /// Cold stream from the property model; hot stream from the point's own
    /// energy balance, C_h = C_c (T_c,o - T_c,i) / (T_h,i - T_h,o).
    cold_side_balance,
};

inline const char* to_string(CapacityRateMode m) {
    return m == CapacityRateMode::properties ? "properties" : "balance";
}

inline CapacityRateMode capacity_rate_mode_from_string(const std::string& s) {
    if (s == "properties") return CapacityRateMode::properties;
    if (s == "balance" || s == "cold_side_balance") return CapacityRateMode::cold_side_balance;
    throw NtuError("unknown capacity-rate mode '" + s + "' (expected 'properties' or 'balance')");
}

struct TabulatedOperatingPoint {
    StreamTemperatures temperatures;  // K; hot = gas, cold = air
    double air_flow_nm3h = 34.0;
    double gas_flow_nm3h = 37.0;
};

/// Full report from capacity rates and stream temperatures.
inline NtuReport analyze(const StreamTemperatures& t, double C_hot, double C_cold) {
    NtuReport r = effectiveness(t, C_hot, C_cold);
    r.NTU = invert_ntu(r.epsilon, r.C_star);
    r.UA = r.NTU * r.C_min;
    return r;
}

inline NtuReport analyze(const TabulatedOperatingPoint& point, const PropertySet& props = {},
                         CapacityRateMode mode = CapacityRateMode::properties) {
    const auto& t = point.temperatures;
    if (!(t.hot_in > t.cold_in)) throw NtuError("analyze: hot inlet must exceed cold inlet");
    const double m_air = normal_flow_to_mass(point.air_flow_nm3h, props.air);
    const double m_gas = normal_flow_to_mass(point.gas_flow_nm3h, props.gas);
    const double C_cold = heat_capacity_rate(props.air, m_air, t.cold_in, t.cold_out);
    double C_hot = 0.0;
    if (mode == CapacityRateMode::properties) {
        C_hot = heat_capacity_rate(props.gas, m_gas, t.hot_in, t.hot_out);
    } else {
        const double dT_hot = t.hot_in - t.hot_out;
        if (!(dT_hot > 0.0)) throw NtuError("analyze: balance mode needs a hot-stream temperature drop");
        C_hot = C_cold * (t.cold_out - t.cold_in) / dT_hot;
    }
    return analyze(t, C_hot, C_cold);
}

/// Report for a solver result, using the solver's own mass flows.
inline NtuReport analyze(const SimulationResult& result, const PropertySet& props = {}) {
    StreamTemperatures t{result.gas_inlet_temperature, result.gas_outlet_temperature, result.air_inlet_temperature,
                         result.air_outlet_temperature};
    const double C_hot = heat_capacity_rate(props.gas, result.gas_mass_flow, t.hot_in, t.hot_out);
    const double C_cold = heat_capacity_rate(props.air, result.air_mass_flow, t.cold_in, t.cold_out);
    return analyze(t, C_hot, C_cold);
}

}  // namespace recup
