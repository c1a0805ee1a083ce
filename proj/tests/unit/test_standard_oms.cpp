#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <qnoise/qnoise.hpp>

#include "oracles/oracles.hpp"

using namespace qnoise;

namespace {

StandardOmsParams dimensionless_set() {
  StandardOmsParams p;
  p.omega_m = 1.0;
  p.gamma_m = 0.2;
  p.kappa = 4.0;
  p.g = 0.3;
  p.g0 = 0.1;
  return p;
}

StandardOmsParams fig8_set() {
  StandardOmsParams p;
  p.omega_m = 2 * std::numbers::pi * 300e3;
  p.gamma_m = 2 * std::numbers::pi * 30e-3;
  p.kappa = 2 * std::numbers::pi * 1e6;
  return p;
}

}  // namespace

TEST(StandardOms, NormalizedCurveMinimum) {
  EXPECT_NEAR(standard_force_noise_normalized(1.0), 1.0, 1e-15);
  const auto [x, v] = oracle::golden_min([](double u) { return standard_force_noise_normalized(std::exp(u)); },
                                         -3, 3);
  EXPECT_NEAR(std::exp(x), 1.0, 1e-6);
  EXPECT_NEAR(v, 1.0, 1e-12);
  for (double x2 : {0.01, 0.3, 2.0, 40.0}) EXPECT_GE(standard_force_noise_normalized(x2), 1.0);
}

TEST(StandardOms, FullFormAtOptimalCouplingIsSql) {
  auto p = fig8_set();
  p.g = std::sqrt(optimal_coupling_sq(p.omega_m, p));
  EXPECT_NEAR(standard_force_noise(p.omega_m, p, ThermalModel::classical), 1.0, 1e-10);
  p.g *= 3.0;
  EXPECT_NEAR(standard_force_noise(p.omega_m, p, ThermalModel::classical),
              standard_force_noise_normalized(3.0), 1e-10);
}

TEST(StandardOms, OptimumOverCooperativityIsSql) {
  const auto p = dimensionless_set();
  for (double w : {0.3, 0.9, 1.0, 1.6}) {
    const auto [u, v] = oracle::golden_min([&](double s) { return quantum_noise_at(w, p, std::exp(s)); }, -15, 15);
    EXPECT_NEAR(v, sql(w, p), 1e-9 * sql(w, p));
    EXPECT_NEAR(std::exp(u), optimal_cooperativity(w, p), 1e-5 * optimal_cooperativity(w, p));
  }
}

TEST(StandardOms, OptimalTotalNeverBelowSql) {
  auto p = dimensionless_set();
  p.temperature = 1e-9;
  LpnParams l{0.05, 1.4, 0.7};
  for (double w : linspace(0.2, 2.0, 91)) {
    EXPECT_GE(optimal_total_noise(w, p, l), sql(w, p));
    EXPECT_GE(optimal_total_noise(w, p, l), optimal_total_noise(w, p, LpnParams{}));
  }
}

TEST(StandardOms, LpnPsdIsSquaredFilter) {
  const LpnParams l{1e4, 2 * std::numbers::pi * 140e3, 2 * std::numbers::pi * 20e3};
  for (double w : {1e3, 5e5, 8.8e5, 2e6}) {
    const double ref = std::norm(lpn_response(w, l));
    EXPECT_NEAR(lpn_psd(w, l), ref, 1e-12 * ref);
  }
  EXPECT_EQ(lpn_psd(1.0, LpnParams{}), 0.0);
}

TEST(StandardOms, DualRouteOutputSpectrum) {
  const auto p = dimensionless_set();
  for (bool with_lpn : {false, true}) {
    LpnParams l;
    if (with_lpn) l = {0.01, 1.4, 0.7};
    const auto sys = standard_oms_system(p, l, ThermalModel::bose);
    const auto [c, d] = standard_oms_output(p, l);
    const auto grid = linspace(0.05, 3.0, 60);
    const auto s = output_spectrum(sys, c, d, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      DetectedOptions o;
      o.thermal = ThermalModel::bose;
      const double ref = detected_spectrum_value(grid[k], p, l, o) * detected_to_output_gain(grid[k], p);
      EXPECT_NEAR(s[k], ref, 1e-9 * ref) << "omega " << grid[k] << " lpn " << with_lpn;
    }
  }
}

TEST(StandardOms, DriftStableForWeakCoupling) {
  const auto sys = standard_oms_system(dimensionless_set(), LpnParams{0.01, 1.4, 0.7});
  EXPECT_TRUE(stability_check(sys.drift).stable);
  EXPECT_EQ(sys.dim(), 6u);
  EXPECT_EQ(sys.inputs(), 4u);
}

TEST(StandardOms, DetectedRequiresResonantDrive) {
  auto p = dimensionless_set();
  p.Delta = 0.5;
  EXPECT_THROW(detected_spectrum_value(1.0, p, LpnParams{}), InputError);
  p.Delta = 0;
  p.g = 0;
  EXPECT_THROW(detected_spectrum_value(1.0, p, LpnParams{}), InputError);
}

TEST(StandardOms, GeometryCoupling) {
  const double wc = 2 * std::numbers::pi * constants::c_light / 780e-9;
  const double g0 = g0_from_geometry(wc, 178e-6, 10e-12, 2 * std::numbers::pi * 100e3);
  const double ref = wc / 178e-6 * std::sqrt(constants::hbar / (10e-12 * 2 * std::numbers::pi * 100e3));
  EXPECT_NEAR(g0, ref, 1e-12 * ref);
  EXPECT_THROW(g0_from_geometry(wc, 0, 1, 1), InputError);
}

TEST(StandardOms, SignalPowerMatchesFormula) {
  const auto p = dimensionless_set();
  const double w = 0.8;
  const double chi_m2 = std::norm(cplx(chi_mech_lorentzian(w, 1.0, 0.2)));
  const double ref = p.kappa * p.gamma_m * p.g * p.g * chi_m2 / (p.kappa * p.kappa / 4 + w * w);
  EXPECT_NEAR(standard_signal_power(w, p), ref, 1e-13 * ref);
}
