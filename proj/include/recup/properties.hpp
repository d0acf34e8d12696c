#pragma once

/**
 * @file properties.hpp
 * @brief Temperature-dependent thermophysical properties of combustion air,
 *        exhaust gas and the printed solid.
 *
 * Fluids use a single-range Janaf polynomial for cp and the Sutherland law
 * for viscosity; the solid uses a cubic conductivity fit. Evaluation outside
 * the declared validity range throws rather than extrapolating.
 */

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace recup {

inline constexpr double kelvin_offset = 273.15;
inline constexpr double normal_pressure = 101325.0;     // Pa
inline constexpr double normal_temperature = 273.15;    // K, 0 °C
inline constexpr double default_prandtl = 0.7;

inline double to_kelvin(double celsius) { return celsius + kelvin_offset; }
inline double to_celsius(double kelvin) { return kelvin - kelvin_offset; }

class PropertyRangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

struct TemperatureRange {
    double lo = 250.0;
    double hi = 1500.0;

    bool contains(double T) const { return T >= lo && T <= hi; }
};

struct FluidModel {
    std::string name;
    double gas_constant = 0.0;          // J/(kg K)
    std::array<double, 5> janaf{};      // a0..a4, powers of T in K
    double sutherland_as = 0.0;         // kg/(m s K^1/2)
    double sutherland_ts = 0.0;         // K
    TemperatureRange validity{250.0, 1500.0};

    void validate() const {
        if (!(gas_constant > 0.0)) throw std::invalid_argument("FluidModel '" + name + "': gas constant must be positive");
        if (!(sutherland_as > 0.0)) throw std::invalid_argument("FluidModel '" + name + "': Sutherland A_s must be positive");
        if (!(sutherland_ts > 0.0)) throw std::invalid_argument("FluidModel '" + name + "': Sutherland T_s must be positive");
        if (!(validity.lo > 0.0 && validity.hi > validity.lo))
            throw std::invalid_argument("FluidModel '" + name + "': invalid validity range");
    }
};

// k_s(T) = b T^3 + c T^2 + d T + e
struct SolidModel {
    std::string name = "printed-alloy";
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double e = 0.0;
    TemperatureRange validity{273.0, 1500.0};
};

struct OperatingPoint {
    double pressure = normal_pressure;  // Pa
    double temperature = 0.0;           // K
};

inline FluidModel air_model() {
    return FluidModel{"air", 287.05, {3.568, 6.787e-4, 1.554e-6, -3.299e-12, -4.664e-13}, 1.458e-6, 110.4, {250.0, 1500.0}};
}

inline FluidModel gas_model() {
    return FluidModel{"gas", 299.25, {3.569, 5.473e-4, 7.858e-6, -5.660e-10, 1.296e-13}, 1.5544e-6, 223.9, {250.0, 1500.0}};
}

inline SolidModel printed_solid_model() {
    return SolidModel{"printed-alloy", -5.0819e-23, 1.1454e-19, 0.0113, 10.004, {273.0, 1500.0}};
}

/// Air, gas and solid models plus the Prandtl closure used for k_f.
struct PropertySet {
    FluidModel air = air_model();
    FluidModel gas = gas_model();
    SolidModel solid = printed_solid_model();
    double prandtl = default_prandtl;
};

namespace detail {

inline void require_in_range(const TemperatureRange& range, double T, const char* what, const std::string& name) {
    if (!std::isfinite(T) || !range.contains(T)) [[unlikely]] {
        throw PropertyRangeError(std::string(what) + "(" + name + "): temperature " + std::to_string(T) + " K outside validity range [" +
                                 std::to_string(range.lo) + ", " + std::to_string(range.hi) + "] K");
    }
}

}  // namespace detail

inline double cp(const FluidModel& model, double T) {
    detail::require_in_range(model.validity, T, "cp", model.name);
    const auto& a = model.janaf;
    return model.gas_constant * ((((a[4] * T + a[3]) * T + a[2]) * T + a[1]) * T + a[0]);
}

/// Specific enthalpy difference h(T) - h(T_ref), exact antiderivative of cp.
inline double enthalpy(const FluidModel& model, double T, double T_ref) {
    detail::require_in_range(model.validity, T, "enthalpy", model.name);
    detail::require_in_range(model.validity, T_ref, "enthalpy", model.name);
    const auto& a = model.janaf;
    auto primitive = [&a](double x) {
        return x * (a[0] + x * (a[1] / 2.0 + x * (a[2] / 3.0 + x * (a[3] / 4.0 + x * a[4] / 5.0))));
    };
    return model.gas_constant * (primitive(T) - primitive(T_ref));
}

inline double viscosity(const FluidModel& model, double T) {
    detail::require_in_range(model.validity, T, "viscosity", model.name);
    return model.sutherland_as * std::sqrt(T) / (1.0 + model.sutherland_ts / T);
}

// Ideal-gas closure.
inline double density(const FluidModel& model, double p, double T) {
    if (!(p > 0.0) || !(T > 0.0)) throw std::invalid_argument("density: pressure and temperature must be positive");
    return p / (model.gas_constant * T);
}

/// Constant-Prandtl closure k_f = mu cp / Pr.
inline double fluid_conductivity(const FluidModel& model, double T, double prandtl = default_prandtl) {
    if (!(prandtl > 0.0)) throw std::invalid_argument("fluid_conductivity: Prandtl number must be positive");
    return viscosity(model, T) * cp(model, T) / prandtl;
}

inline double solid_conductivity(const SolidModel& model, double T) {
    detail::require_in_range(model.validity, T, "solid_conductivity", model.name);
    return ((model.b * T + model.c) * T + model.d) * T + model.e;
}

/// Nm3/h (0 °C, 101325 Pa) to kg/s.
inline double normal_flow_to_mass(double normal_m3_per_h, const FluidModel& model) {
    if (!(normal_m3_per_h >= 0.0)) throw std::invalid_argument("normal_flow_to_mass: flow must be non-negative");
    return normal_m3_per_h * density(model, normal_pressure, normal_temperature) / 3600.0;
}

}  // namespace recup
