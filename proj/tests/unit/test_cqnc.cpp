#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <qnoise/qnoise.hpp>

#include "oracles/oracles.hpp"

using namespace qnoise;

namespace {
constexpr double kTwoPi = 2 * std::numbers::pi;

CqncParams matched(double kappa = 4.0) {
  CqncParams p;
  p.omega_m = 1.0;
  p.gamma_m = 0.05;
  p.kappa = kappa;
  p.g = p.G = 0.4;
  p.Gamma = p.gamma_m;
  return p;
}
}  // namespace

TEST(Cqnc, CancellationIdentity) {
  const auto p = matched();
  for (double w : linspace(0.0, 3.0, 301)) {
    const cplx chi_m = chi_mech_lorentzian(w, p.omega_m, p.gamma_m);
    EXPECT_LT(std::abs(backaction_sum(w, p)) / (p.g * p.g * std::abs(chi_m)), 1e-14);
  }
  auto q = p;
  q.drop_gamma_sq = false;
  EXPECT_GT(std::abs(backaction_sum(1.0, q)), 0.0);
}

TEST(Cqnc, ExactAssemblyMatchesMatrixRoute) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 20; ++k) {
    CqncParams p;
    p.omega_m = 1.0;
    p.gamma_m = 0.02 + 0.1 * u(rng);
    p.kappa = 1.0 + 5.0 * u(rng);
    p.g = 0.1 + 0.3 * u(rng);
    p.G = p.g * (0.8 + 0.4 * u(rng));
    p.Gamma = p.gamma_m * (0.5 + u(rng));
    p.Delta_c = (u(rng) - 0.5) * 0.4;
    p.n_d = 0.3 * u(rng);
    p.temperature = 0;
    p.drop_gamma_sq = false;
    const auto sq = SqueezedInput::pure(2.0 * u(rng), kTwoPi * u(rng));
    if (!stability_check(cqnc_system(p, sq).drift).stable) continue;
    for (double w : {0.3, 0.97, 1.4}) {
      const double a = force_noise_exact(w, p, sq, ThermalModel::bose);
      const double b = force_noise_lti(w, p, sq, ThermalModel::bose);
      EXPECT_NEAR(a, b, 1e-9 * b) << "draw " << k << " omega " << w;
    }
  }
}

TEST(Cqnc, PerfectClosedFormInFastCavityLimit) {
  const auto p = matched(1e4);
  for (double N : {0.0, 1.0, 10.0}) {
    for (double y : {0.0, 0.5}) {
      auto q = p;
      q.Delta_c = y * q.kappa;
      q.g = q.G = 30.0;
      const auto sq = SqueezedInput::pure(N, phi_opt(y));
      for (double w : {0.9, 1.0, 1.05}) {
        const double exact = force_noise_exact(w, q, sq);
        const double closed = force_noise_spectrum_perfect(w, q, sq);
        EXPECT_NEAR(exact, closed, 2e-3 * closed) << "N " << N << " y " << y << " w " << w;
      }
    }
  }
}

TEST(Cqnc, MismatchFormReducesToPerfect) {
  auto p = matched(100.0);
  for (double N : {0.0, 3.0}) {
    const auto sq = SqueezedInput::pure(N, 0.0);
    for (double w : {0.5, 1.0, 1.2})
      EXPECT_NEAR(force_noise_spectrum_mismatch(w, p, sq), force_noise_spectrum_perfect(w, p, sq),
                  1e-12 * force_noise_spectrum_perfect(w, p, sq));
  }
  EXPECT_THROW(force_noise_spectrum_perfect(1.0, [] {
                 auto q = matched();
                 q.G = 0.5;
                 return q;
               }(), SqueezedInput{}),
               InputError);
}

TEST(Cqnc, LargeCouplingApproachesFloor) {
  auto p = matched(1e3);
  p.g = p.G = 200.0;
  // residual shot noise at resonance is kappa gamma_m / (8 g^2)
  EXPECT_NEAR(force_noise_spectrum_perfect(1.0, p, SqueezedInput{}) - cqnc_floor(1.0, p),
              p.kappa * p.gamma_m / (8 * p.g * p.g), 1e-12);
  EXPECT_NEAR(cqnc_floor(0.0, p), 0.5 * (1 + p.gamma_m * p.gamma_m / 4), 1e-15);
}

TEST(Squeezing, HminAgainstGridSearch) {
  for (double N : {0.0, 0.5, 3.0, 40.0}) {
    const double Mabs = std::sqrt(N * (N + 1));
    double best = 1e300;
    for (int i = 0; i <= 600; ++i) {
      const double y = -1.5 + 3.0 * i / 600;
      const auto r = oracle::golden_min(
          [&](double ph) { return squeeze_objective(std::polar(Mabs, ph), N, y); },
          phi_opt(y) - 1.0, phi_opt(y) + 1.0);
      best = std::min(best, r.second);
    }
    EXPECT_GE(best, h_min(N) - 1e-12);
    EXPECT_NEAR(best, h_min(N), 1e-9 + 1e-6 * h_min(N));
  }
  EXPECT_EQ(phi_opt(0.0), 0.0);
  EXPECT_THROW(h_min(-1.0), InputError);
}

TEST(Squeezing, ObjectiveCoversSqueezingTerm) {
  // the bracket of the perfect spectrum is the objective minimized over phase and detuning
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 200; ++k) {
    const double N = 5 * u(rng), y = 2 * u(rng) - 1;
    const cplx M = std::polar(std::sqrt(N * (N + 1)) * u(rng), kTwoPi * u(rng));
    const double q = 0.5 + 2 * y * y;
    EXPECT_NEAR(0.5 * q * q + squeezing_term(M, N, y), squeeze_objective(M, N, y), 1e-10 * (1 + N));
  }
}

TEST(Squeezing, InputValidation) {
  EXPECT_THROW((SqueezedInput{1.0, 2.0}.validate()), InputError);
  EXPECT_NO_THROW(SqueezedInput::pure(3.0, 1.0).validate());
  EXPECT_NEAR(std::abs(SqueezedInput::pure(3.0).M), std::sqrt(12.0), 1e-14);
}

TEST(Cqnc, SqueezingKeepsSqlAtResonanceButLowersPower) {
  CqncParams p;
  p.omega_m = kTwoPi * 300e3;
  p.gamma_m = kTwoPi * 30e-3;
  p.kappa = kTwoPi * 1e6;
  double prev_g2 = 1e300;
  for (double N : {0.0, 1.0, 10.0}) {
    const auto sq = SqueezedInput::pure(N, 0.0);
    const auto r = oracle::golden_min(
        [&](double lg2) {
          auto q = p;
          q.g = std::exp(0.5 * lg2);
          return standard_force_noise_squeezed(q.omega_m, q, sq);
        },
        std::log(1e2), std::log(1e14), 1e-12);
    EXPECT_NEAR(r.second, 1.0, 1e-6) << N;
    EXPECT_LT(r.first, prev_g2);
    prev_g2 = r.first;
  }
}

TEST(Cqnc, PowerToCoupling) {
  CqncParams p;
  p.omega_m = kTwoPi * 300e3;
  p.gamma_m = kTwoPi * 30e-3;
  p.kappa = kTwoPi * 1e6;
  p.g0 = kTwoPi * 300;
  p.lambda_L = 780e-9;
  const auto r = power_to_coupling(24e-6, p);
  const double wL = kTwoPi * constants::c_light / 780e-9;
  const double alpha = std::sqrt(24e-6 * p.kappa / (constants::hbar * wL)) / (p.kappa / 2);
  EXPECT_NEAR(std::abs(r.alpha), alpha, 1e-9 * alpha);
  EXPECT_NEAR(std::abs(r.alpha), 7745, 5);
  EXPECT_NEAR(r.g, 2.92e7, 0.01e7);
  EXPECT_THROW(pump_rate(-1, p), InputError);
}
