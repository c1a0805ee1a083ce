#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <qnoise/qnoise.hpp>

#include "oracles/oracles.hpp"

using namespace qnoise;

namespace {
constexpr double kTwoPi = 2 * std::numbers::pi;

oracle::RMat rows_of(const RMatrix& A) {
  oracle::RMat m(A.rows(), std::vector<double>(A.cols()));
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) m[i][j] = A(i, j);
  return m;
}

bool rh_stable(const HybridParams& p) { return oracle::hurwitz_stable(oracle::char_poly(rows_of(build_drift(p).drift))); }

HybridParams set(double C0, double C1, double xi_m, double xi_d) {
  return HybridParams::from_cooperativities(C0, C1, xi_m, xi_d, 10.0, 1.0, 1.0);
}
}  // namespace

TEST(Parametric, CooperativityRoundTrip) {
  const auto p = HybridParams::from_cooperativities(0.04, 0.5, 0.9, 0.2, kTwoPi * 1.3e6, kTwoPi * 100, kTwoPi * 80);
  const auto c = cooperativities(p);
  EXPECT_NEAR(c.C0, 0.04, 1e-14);
  EXPECT_NEAR(c.C1, 0.5, 1e-14);
  EXPECT_NEAR(p.lambda_m(), 0.9 * p.gamma_m / 2, 1e-12);
  EXPECT_THROW(HybridParams::from_cooperativities(-1, 0, 0, 0, 1, 1, 1), InputError);
}

TEST(Parametric, SusceptibilitiesMatchSixBySixInverse) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 20; ++k) {
    auto p = set(u(rng), u(rng), 0.9 * u(rng), 0.9 * u(rng));
    const double w = 3.0 * (u(rng) - 0.5);
    oracle::CMat R(6, std::vector<oracle::cplx>(6));
    const auto A = build_drift(p).drift;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) R[i][j] = -A(i, j) - (i == j ? cplx(0, w) : cplx(0));
    const auto inv = oracle::inverse(R);
    const auto s = susceptibility_elements(w, p);
    EXPECT_NEAR(std::abs(s.chi22 - inv[1][1]), 0, 1e-10 * std::abs(inv[1][1]));
    EXPECT_NEAR(std::abs(s.chi23 - inv[1][2]), 0, 1e-10 * (1 + std::abs(inv[1][2])));
    EXPECT_NEAR(std::abs(s.chi25 - inv[1][4]), 0, 1e-10 * (1 + std::abs(inv[1][4])));
    // conjugate symmetry of a real drift
    const auto sm = susceptibility_elements(-w, p);
    EXPECT_NEAR(std::abs(sm.chi22 - std::conj(s.chi22)), 0, 1e-13);
  }
}

TEST(Parametric, ClosedFormMatchesZeroFrequencyLimit) {
  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> u(0, 1);
  int checked = 0;
  while (checked < 50) {
    const double C0 = 0.01 + u(rng), C1 = u(rng), xi_d = 0.9 * u(rng);
    const double xi_m = std::min(0.95, drift_zero_crossing_xi_m(C0, C1, xi_d) - 0.05) * u(rng);
    auto p = set(C0, C1, xi_m, xi_d);
    p.n_c = u(rng);
    p.n_d = u(rng);
    if (!stability_check(build_drift(p).drift).stable) continue;
    if (std::abs(1 - optical_gain_root(C0, C1, xi_m, xi_d)) < 1e-3) continue;
    const auto num = response_and_noise(1e-9, p);
    const auto cf = resonance_closed_form(p);
    EXPECT_NEAR(num.R_m, cf.R_m, 1e-6 * cf.R_m);
    EXPECT_NEAR(num.n_add, cf.n_add, 1e-6 * cf.n_add);
    ++checked;
  }
}

TEST(Parametric, StabilityAgreesWithRouthHurwitzOnGrid) {
  for (double C0 : {0.04, 0.4})
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        const auto p = set(C0, 0.5, 0.013 + 0.1 * i, 0.017 + 0.1 * j);
        EXPECT_EQ(stability_check(build_drift(p).drift).stable, rh_stable(p)) << i << " " << j;
      }
}

TEST(Parametric, ZeroCrossingMatchesEigenThreshold) {
  for (double xi_d : {0.0, 0.3, 0.7}) {
    const double C0 = 0.3, C1 = 0.5;
    const double crossing = drift_zero_crossing_xi_m(C0, C1, xi_d);
    const double found = oracle::bisect(
        [&](double xm) { return stability_check(build_drift(set(C0, C1, xm, xi_d)).drift).max_real_part; },
        0.0, 3.0, 1e-13);
    EXPECT_NEAR(found, crossing, 1e-6) << xi_d;
  }
  // with xi_d = 0 the bound reduces to gamma_m/2 (1 + C0/(1 + C1))
  const auto p = set(0.3, 0.5, 0.1, 0.0);
  EXPECT_NEAR(lambda_max(p).lambda_m_max, 0.5 * (1 + 0.3 / 1.5), 1e-14);
  const auto bare = set(0.3, 0.0, 0.1, 0.0);
  EXPECT_NEAR(lambda_max(bare).lambda_m_max * 2 / bare.gamma_m, 1.3, 1e-14);
}

TEST(Parametric, ImpedanceMatching) {
  const double xm = impedance_match(0.04, 0.5, 1.42);
  EXPECT_NEAR(xm, 0.98174, 1e-5);
  EXPECT_LT(std::abs(optical_gain_root(0.04, 0.5, xm, 1.42)), 1e-12);
  EXPECT_NEAR(impedance_match(0.04, 0.0, 0.0), 0.96, 1e-15);
  EXPECT_NEAR(impedance_match(0.4, 0.0, 0.0), 0.6, 1e-15);
  // every unknown round-trips
  const double C0 = 0.3, C1 = 0.2, xd = 0.4;
  const double xi = impedance_match(C0, C1, xd);
  EXPECT_NEAR(impedance_solve(ImpedanceUnknown::C0, 0, C1, xi, xd), C0, 1e-12);
  EXPECT_NEAR(impedance_solve(ImpedanceUnknown::C1, C0, 0, xi, xd), C1, 1e-12);
  EXPECT_NEAR(impedance_solve(ImpedanceUnknown::xi_d, C0, C1, xi, 0), xd, 1e-12);
  EXPECT_THROW(impedance_match(0.1, 0.2, 1.0), InputError);
}

TEST(Parametric, NoAtomicModulationSpecialCase) {
  const double C0 = 0.2, C1 = 0.3;
  const double xm = impedance_match(C0, C1, 0.0);
  auto p = set(C0, C1, xm, 0.0);
  p.n_d = 0.4;
  const auto cf = resonance_closed_form(p);
  EXPECT_NEAR(cf.n_add, C1 / C0 * (1 - xm) * (1 - xm) * (p.n_d + 0.5), 1e-12);
  EXPECT_NEAR(cf.R_m, C0 / ((1 - xm) * (1 - xm)), 1e-10);
}

TEST(Parametric, OffModulationNoAmplification) {
  for (double C0 : {0.05, 0.3, 0.7, 0.95}) {
    const auto off = off_modulation_closed_form(C0, 1 - C0, 0.1, 0.2);
    EXPECT_LE(off.R_m, 1.0);
    auto p = set(C0, 1 - C0, 0.0, 0.0);
    p.n_c = 0.1;
    p.n_d = 0.2;
    const auto num = response_and_noise(0.0, p);
    EXPECT_NEAR(num.R_m, off.R_m, 1e-12);
    EXPECT_NEAR(num.n_add, off.n_add, 1e-10 * off.n_add);
  }
}

TEST(Parametric, UnstableSetsThrowUnlessAllowed) {
  const auto p = set(0.04, 0.5, impedance_match(0.04, 0.5, 1.42), 1.42);
  EXPECT_FALSE(stability_check(build_drift(p).drift).stable);
  EXPECT_THROW(response_and_noise(0.0, p), UnstableError);
  ParametricOptions o;
  o.require_stable = false;
  EXPECT_NO_THROW(response_and_noise(0.0, p, o));
}

TEST(Parametric, SensitivityFromForceNoise) {
  auto p = HybridParams::from_cooperativities(0.04, 0.0, 0.96, 0.0, kTwoPi * 1.3e6, kTwoPi * 100, kTwoPi * 100,
                                              1e5, 1e-12);
  const double s = sensitivity(0.0, p);
  const double ref = std::sqrt(1e-12 * constants::hbar * 1e5 * kTwoPi * 100 * 0.5);
  EXPECT_NEAR(s, ref, 1e-9 * ref);
  EXPECT_NEAR(snr(0.0, p, 2 * ref), 2.0, 1e-9);
  p.mass = 0;
  EXPECT_THROW(force_noise(0.0, p), InputError);
}

TEST(Parametric, BecCoefficients) {
  const auto b = bec_derive(1e5, kTwoPi * 14.1e6, -8e11, 23.7e3, 5e3, kTwoPi * 6e6);
  EXPECT_GT(b.U0, 0);
  EXPECT_NEAR(b.delta0, 1e5 * b.U0 / 2, 1e-9 * b.delta0);
  EXPECT_NEAR(b.G0, std::sqrt(2e5) * b.U0 / 4, 1e-9 * b.G0);
  EXPECT_TRUE(b.dispersive);
  EXPECT_FALSE(bec_derive(1e5, 1.0, 1e6, 1.0, 1.0, 1e5).dispersive);
  EXPECT_THROW(bec_derive(1e5, 1.0, 0.0, 1.0, 1.0), InputError);
}

TEST(Parametric, ExperimentDerivationFlagsNegativePhotonNumber) {
  ExperimentInputs in;
  in.C0 = 0.04;
  in.C1 = 0.5;
  in.n_atoms = 1e5;
  in.g_a = kTwoPi * 14.1e6;
  in.omega_R = 23.7e3;
  in.gamma_m = in.gamma_d = kTwoPi * 100;
  in.omega_m = 1e5;
  in.kappa = kTwoPi * 1.3e6;
  in.omega_c = 2.41494e15;
  in.omega_a = 2.41419e15;
  in.g0 = g0_from_zpf(in.omega_c, 178e-6, 1e-12, in.omega_m);
  const auto d = experiment_derive(in);
  EXPECT_NEAR(d.omega_sw + 4 * in.omega_R, in.omega_m, 1e-9);
  EXPECT_NEAR(d.omega_L, in.omega_a - d.Delta_a, 1.0);
  EXPECT_LT(d.Delta_a, 0);
  EXPECT_EQ(d.consistent, d.n_cav >= 0);
  if (!d.consistent) EXPECT_TRUE(std::isnan(d.E_L));
}
