#pragma once

#include <span>

#include "qnoise/lti.hpp"
#include "qnoise/spectrum.hpp"
#include "qnoise/standard_oms.hpp"

namespace qnoise {

/// Cavity coupled to a mechanical oscillator (g) and an inverted atomic ensemble (G).
struct CqncParams {
  double omega_m = 0;
  double gamma_m = 0;
  double kappa = 0;
  double g = 0;
  double G = 0;
  double Gamma = 0;  // atomic dephasing
  double Delta_c = 0;
  double mass = 0;
  double temperature = 0;
  double n_d = 0;  // atomic bath occupation
  bool drop_gamma_sq = true;
  // bookkeeping for the power <-> coupling conversion
  double g0 = 0;
  double lambda_L = 0;
  double P_L = 0;
  double kappa_in = 0;  // input coupling rate; kappa when zero

  void validate() const;
  /// g = G and Gamma = gamma_m to relative 1e-12.
  bool perfectly_matched() const;
};

/// Squeezed vacuum with <a a> = M and <a^dag a> = N.
struct SqueezedInput {
  double N = 0;
  cplx M = 0;

  static SqueezedInput vacuum() { return {}; }
  /// |M| = sqrt(N(N+1)) at phase phi.
  static SqueezedInput pure(double N, double phi = 0);
  void validate() const;
};

/// Coefficients of the output phase quadrature on each input.
struct PoutCoefficients {
  cplx force;  // f + F_ext
  cplx p_a;    // P_a^in
  cplx x_a;    // X_a^in, shot and back-action combined
  cplx p_d;    // P_d^in
  cplx x_d;    // X_d^in
  cplx chi_a;
  cplx chi_a_eff;
  cplx chi_m;
  cplx chi_d;
};

PoutCoefficients output_phase_quadrature_coeffs(double omega, const CqncParams& p);

/// g^2 chi_m + G^2 chi_d, the back-action path sum.
cplx backaction_sum(double omega, const CqncParams& p);

/// Force noise from the coefficient set, symmetrized, thermal term added.
double force_noise_exact(double omega, const CqncParams& p, const SqueezedInput& sq,
                         ThermalModel thermal = ThermalModel::classical);

/// Closed form for matched parameters and kappa >> w.
double force_noise_spectrum_perfect(double omega, const CqncParams& p, const SqueezedInput& sq,
                                    ThermalModel thermal = ThermalModel::classical);

/// Atomic floor (1 + (w^2 + gamma_m^2/4)/w_m^2)/2.
double cqnc_floor(double omega, const CqncParams& p);

/// Squeezing contribution to the shot-noise bracket.
double squeezing_term(cplx M, double N, double y);

double squeeze_a(double y);
double squeeze_b(double y);
double squeeze_objective(cplx M, double N, double y);
double phi_opt(double y);
double h_min(double N);

/// Shot-noise term after optimizing squeezing phase and detuning.
double shot_noise_optimized(double omega, const CqncParams& p, double N);

/// chi_d / chi_m.
cplx response_ratio(double omega, const CqncParams& p);

/// Resonant-drive force noise with coupling and damping mismatch.
double force_noise_spectrum_mismatch(double omega, const CqncParams& p, const SqueezedInput& sq,
                                     ThermalModel thermal = ThermalModel::classical);

/// Bare cavity with the same squeezed input (no atoms).
double standard_force_noise_squeezed(double omega, const CqncParams& p, const SqueezedInput& sq,
                                     ThermalModel thermal = ThermalModel::classical);

/// Pump amplitude E_L = sqrt(P_L kappa_in / (hbar w_L)).
double pump_rate(double P_L, const CqncParams& p);

/// Steady intracavity amplitude and g = 2 g0 |alpha_s|.
struct CouplingFromPower {
  cplx alpha;
  double g;
};
CouplingFromPower power_to_coupling(double P_L, const CqncParams& p);

/// Fluctuation equations over (X, P, X_d, P_d, X_a, P_a) with inputs
/// (f, X_a^in, P_a^in, X_d^in, P_d^in).
LinearSystem cqnc_system(const CqncParams& p, const SqueezedInput& sq,
                         ThermalModel thermal = ThermalModel::bose);

/// Force noise through the matrix route: S_Pout / |T_{Pout, f}|^2.
double force_noise_lti(double omega, const CqncParams& p, const SqueezedInput& sq,
                       ThermalModel thermal = ThermalModel::bose);

}  // namespace qnoise
