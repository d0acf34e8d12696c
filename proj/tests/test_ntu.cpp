#include <gtest/gtest.h>

#include <cmath>

#include "recup/ntu.hpp"

using namespace recup;

namespace {

// Textbook form, evaluated directly.
double epsilon_reference(double ntu, double cs) {
    if (cs == 1.0) return ntu / (1.0 + ntu);
    const double e = std::exp(-ntu * (1.0 - cs));
    return (1.0 - e) / (1.0 - cs * e);
}

}  // namespace

TEST(Counterflow, ClosedFormValues) {
    EXPECT_NEAR(counterflow_epsilon(1.0, 0.0), 1.0 - std::exp(-1.0), 1e-15);
    EXPECT_NEAR(counterflow_epsilon(3.0, 1.0), 0.75, 1e-15);
    EXPECT_NEAR(counterflow_epsilon(1.0, 0.5), 0.56474, 1e-5);
    EXPECT_DOUBLE_EQ(counterflow_epsilon(0.0, 0.7), 0.0);
    EXPECT_DOUBLE_EQ(counterflow_epsilon(INFINITY, 0.7), 1.0);
}

TEST(Counterflow, MatchesDirectFormula) {
    for (double cs = 0.0; cs < 1.0; cs += 0.05)
        for (double ntu = 0.05; ntu < 8.0; ntu += 0.25)
            EXPECT_NEAR(counterflow_epsilon(ntu, cs), epsilon_reference(ntu, cs), 1e-12);
}

TEST(Counterflow, RoundTripGrid) {
    for (double cs = 0.0; cs <= 1.0; cs += 0.1) {
        for (double ntu = 0.01; ntu < 10.0; ntu *= 1.5) {
            const double eps = counterflow_epsilon(ntu, cs);
            EXPECT_NEAR(invert_ntu(eps, cs), ntu, 1e-10 * std::max(1.0, ntu)) << cs << " " << ntu;
        }
    }
}

TEST(Counterflow, MonotoneInNtuAndCStar) {
    for (double cs : {0.0, 0.3, 0.8, 1.0}) {
        double prev = -1.0;
        for (double ntu = 0.0; ntu < 10.0; ntu += 0.1) {
            const double e = counterflow_epsilon(ntu, cs);
            EXPECT_GT(e, prev);
            prev = e;
        }
    }
    EXPECT_GT(counterflow_epsilon(2.0, 0.2), counterflow_epsilon(2.0, 0.6));
}

TEST(Counterflow, ContinuousAtBalancedRates) {
    for (double ntu : {0.5, 2.0, 5.0}) {
        EXPECT_NEAR(counterflow_epsilon(ntu, 1.0 - 1e-10), ntu / (1.0 + ntu), 1e-9);
        EXPECT_NEAR(invert_ntu(ntu / (1.0 + ntu), 1.0 - 1e-10), ntu, 1e-8);
    }
}

TEST(Counterflow, SlopeInCStarAtBalancedRates) {
    // d(eps)/dC* at C* = 1 is -NTU^2 / (2 (1 + NTU)^2); -9/32 at NTU = 3.
    const double h = 1e-6;
    const double slope = (counterflow_epsilon(3.0, 1.0) - counterflow_epsilon(3.0, 1.0 - h)) / h;
    EXPECT_NEAR(slope, -9.0 / 32.0, 1e-5);
}

TEST(Counterflow, InverseRejectsBadInput) {
    EXPECT_THROW(invert_ntu(1.0, 0.5), NtuError);
    EXPECT_THROW(invert_ntu(-0.1, 0.5), NtuError);
    EXPECT_THROW(invert_ntu(0.5, 1.2), NtuError);
    EXPECT_THROW(counterflow_epsilon(-1.0, 0.5), NtuError);
    EXPECT_DOUBLE_EQ(invert_ntu(0.0, 0.4), 0.0);
}

TEST(Effectiveness, HandExample) {
    // Cold side is C_min: eps = 500 / 900.
    const StreamTemperatures t{1000.0, 700.0, 100.0, 600.0};
    const auto r = effectiveness(t, 50.0, 30.0);
    EXPECT_TRUE(r.cold_is_min);
    EXPECT_DOUBLE_EQ(r.q_hot, 15000.0);
    EXPECT_DOUBLE_EQ(r.q_cold, 15000.0);
    EXPECT_NEAR(r.epsilon, 500.0 / 900.0, 1e-15);
    EXPECT_NEAR(r.C_star, 0.6, 1e-15);
    EXPECT_DOUBLE_EQ(r.energy_imbalance, 0.0);
    EXPECT_NEAR(r.epsilon * r.q_max, r.q, 1e-9);
}

TEST(Effectiveness, HotSideMinimum) {
    const StreamTemperatures t{1000.0, 400.0, 100.0, 400.0};
    const auto r = effectiveness(t, 10.0, 20.0);
    EXPECT_FALSE(r.cold_is_min);
    EXPECT_NEAR(r.epsilon, 600.0 / 900.0, 1e-15);
}

TEST(Effectiveness, ReportsImbalance) {
    const StreamTemperatures t{1000.0, 700.0, 100.0, 600.0};
    const auto r = effectiveness(t, 50.0, 33.0);
    EXPECT_NEAR(r.energy_imbalance, (16500.0 - 15000.0) / 16500.0, 1e-15);
}

TEST(Effectiveness, SecondLawViolationsThrow) {
    EXPECT_THROW(effectiveness({300.0, 300.0, 1000.0, 1000.0}, 1.0, 1.0), NtuError);
    EXPECT_THROW(effectiveness({1000.0, 1100.0, 100.0, 600.0}, 1.0, 1.0), NtuError);
    EXPECT_THROW(effectiveness({1000.0, 700.0, 100.0, 1200.0}, 1.0, 1.0), NtuError);
    EXPECT_THROW(effectiveness({1000.0, 700.0, 100.0, 600.0}, 0.0, 1.0), NtuError);
}

TEST(Analyze, ConductanceIsNtuTimesCMin) {
    const StreamTemperatures t{1000.0, 700.0, 100.0, 600.0};
    const auto r = analyze(t, 50.0, 30.0);
    EXPECT_NEAR(r.NTU, invert_ntu(500.0 / 900.0, 0.6), 1e-14);
    EXPECT_NEAR(r.UA, r.NTU * 30.0, 1e-12);
    EXPECT_NEAR(counterflow_epsilon(r.NTU, r.C_star), r.epsilon, 1e-12);
}

TEST(CapacityRate, EnthalpyMeanMatchesQuadrature) {
    const FluidModel gas = gas_model();
    const double a = 600.0, b = 1200.0, m = 0.0127;
    const int n = 1000;
    const double h = (b - a) / n;
    double s = cp(gas, a) + cp(gas, b);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * cp(gas, a + k * h);
    const double mean_cp = s * h / 3.0 / (b - a);
    EXPECT_NEAR(heat_capacity_rate(gas, m, b, a), m * mean_cp, 1e-9 * m * mean_cp);
    EXPECT_NEAR(heat_capacity_rate(gas, m, 800.0, 800.05), m * cp(gas, 800.025), 1e-12);
    EXPECT_THROW(heat_capacity_rate(gas, 0.0, 800.0, 900.0), NtuError);
}

TEST(CapacityRate, ModeNames) {
    EXPECT_EQ(capacity_rate_mode_from_string("balance"), CapacityRateMode::cold_side_balance);
    EXPECT_EQ(capacity_rate_mode_from_string("properties"), CapacityRateMode::properties);
    EXPECT_STREQ(to_string(CapacityRateMode::cold_side_balance), "balance");
    EXPECT_THROW(capacity_rate_mode_from_string("other"), NtuError);
}

TEST(Analyze, BalanceModeClosesEnergy) {
    TabulatedOperatingPoint p;
    p.temperatures = {to_kelvin(960.0), to_kelvin(282.4), to_kelvin(30.0), to_kelvin(597.2)};
    const auto r = analyze(p, {}, CapacityRateMode::cold_side_balance);
    EXPECT_NEAR(r.energy_imbalance, 0.0, 1e-12);
    const double m_air = normal_flow_to_mass(34.0, air_model());
    EXPECT_NEAR(r.C_cold, heat_capacity_rate(air_model(), m_air, p.temperatures.cold_in, p.temperatures.cold_out), 1e-12);
    // The hot stream is C_min here.
    EXPECT_FALSE(r.cold_is_min);
    EXPECT_NEAR(r.epsilon, (960.0 - 282.4) / 930.0, 1e-12);
}

TEST(Analyze, PropertiesModeUsesBothModels) {
    TabulatedOperatingPoint p;
    p.temperatures = {to_kelvin(960.0), to_kelvin(282.4), to_kelvin(30.0), to_kelvin(597.2)};
    const auto r = analyze(p, {}, CapacityRateMode::properties);
    const double m_gas = normal_flow_to_mass(37.0, gas_model());
    EXPECT_NEAR(r.C_hot, heat_capacity_rate(gas_model(), m_gas, p.temperatures.hot_in, p.temperatures.hot_out), 1e-12);
    EXPECT_GT(r.NTU, 0.0);
}

TEST(Analyze, RecoversSolverConductance) {
    PropertySet props;
    props.air.janaf = {3.5, 0.0, 0.0, 0.0, 0.0};
    props.gas.janaf = {4.0, 0.0, 0.0, 0.0, 0.0};
    SolverConfig c;
    c.segments = 400;
    c.prescribed_u = 300.0;
    c.tolerance = 1e-12;
    c.energy_tolerance = 1e-12;
    c.max_iterations = 5000;
    const auto result = solve(build_layout(AnnulusSpec{}, 1, 2, 1.0), WavyTransform::straight(), {}, c, props);
    ASSERT_TRUE(result.converged);
    const auto r = analyze(result, props);
    EXPECT_NEAR(r.UA, result.total_conductance, 1e-3 * result.total_conductance);
    EXPECT_LT(r.energy_imbalance, 1e-9);
}
