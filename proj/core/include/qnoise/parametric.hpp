#pragma once

#include <span>
#include <string>

#include "qnoise/lti.hpp"

namespace qnoise {

/// Modulated hybrid cavity: mechanical mode b and Bogoliubov mode d, both parametrically driven.
struct HybridParams {
  double omega_m = 0;
  double gamma_m = 0;
  double gamma_d = 0;
  double kappa = 0;
  double g = 0;
  double G = 0;
  double xi_m = 0;  // 2 lambda_m / gamma_m
  double xi_d = 0;  // 2 lambda_d / gamma_d
  double n_c = 0;
  double n_m = 0;
  double n_d = 0;
  double mass = 0;

  double lambda_m() const { return xi_m * gamma_m / 2.0; }
  double lambda_d() const { return xi_d * gamma_d / 2.0; }
  void validate() const;

  /// g and G from C0 = 4g^2/(kappa gamma_m) and C1 = 4G^2/(kappa gamma_d).
  static HybridParams from_cooperativities(double C0, double C1, double xi_m, double xi_d,
                                           double kappa, double gamma_m, double gamma_d,
                                           double omega_m = 0, double mass = 0);
};

struct Cooperativities {
  double C0 = 0;
  double C1 = 0;
  double Cm = 0;  // collective, mechanical
  double Cd = 0;  // collective, atomic
};

Cooperativities cooperativities(const HybridParams& p);

/// Dispersive-BEC coefficients.
struct BecDerived {
  double U0 = 0;       // -g_a^2 / Delta_a
  double delta0 = 0;   // N U0 / 2
  double G0 = 0;       // sqrt(2N) U0 / 4
  double omega_d = 0;  // 4 w_R + w_sw
  double g_CK = 0;     // U0 / 2, reported only
  double omega_sw = 0;
  bool dispersive = true;  // |Delta_a| >> Gamma_a when a linewidth is supplied
};

BecDerived bec_derive(double n_atoms, double g_a, double Delta_a, double omega_R, double omega_sw,
                      double Gamma_a = 0);

/// Drift, noise map and thermal correlations of the six quadratures (X_a, P_a, X_b, P_b, X_d, P_d).
LinearSystem build_drift(const HybridParams& p);

/// Routh-Hurwitz bounds (gamma/2)(1 + C) with the collective cooperativities.
struct LambdaMax {
  double lambda_m_max = 0;
  double lambda_d_max = 0;
};
LambdaMax lambda_max(const HybridParams& p);

/// xi_m at which the {P_a, X_b, X_d} block of the drift acquires a zero eigenvalue for fixed xi_d.
double drift_zero_crossing_xi_m(double C0, double C1, double xi_d);

struct Susceptibilities {
  cplx chi22;
  cplx chi23;
  cplx chi25;
};
Susceptibilities susceptibility_elements(double omega, const HybridParams& p);

struct ResponseNoise {
  double R_m = 0;
  double n_add = 0;
};

struct ParametricOptions {
  bool require_stable = true;
};

ResponseNoise response_and_noise(double omega, const HybridParams& p,
                                 const ParametricOptions& opt = {});

/// Optical gain root sqrt(G_a) on resonance.
double optical_gain_root(double C0, double C1, double xi_m, double xi_d);
/// On-resonance closed forms.
ResponseNoise resonance_closed_form(const HybridParams& p);
/// Unmodulated closed forms.
ResponseNoise off_modulation_closed_form(double C0, double C1, double n_c, double n_d);

/// Impedance matching: xi_m = 1 - C0 / (1 - C1/(1 - xi_d)).
double impedance_match(double C0, double C1, double xi_d);

/// Solve the impedance condition for any one of C0, C1, xi_m, xi_d given the other three.
enum class ImpedanceUnknown { C0, C1, xi_m, xi_d };
double impedance_solve(ImpedanceUnknown which, double C0, double C1, double xi_m, double xi_d);

/// m hbar w_m gamma_m [(n_m + 1/2) + n_add], N^2/Hz.
double force_noise(double omega, const HybridParams& p, const ParametricOptions& opt = {});
/// sqrt(force_noise), N/sqrt(Hz).
double sensitivity(double omega, const HybridParams& p, const ParametricOptions& opt = {});
/// |F~| / sensitivity.
double snr(double omega, const HybridParams& p, double F_tilde, const ParametricOptions& opt = {});

/// Inputs for the experimental-parameter derivation.
struct ExperimentInputs {
  double C0 = 0;
  double C1 = 0;
  double n_atoms = 0;
  double g_a = 0;
  double g0 = 0;
  double omega_R = 0;
  double gamma_m = 0;
  double gamma_d = 0;
  double omega_m = 0;
  double kappa = 0;
  double omega_c = 0;
  double omega_a = 0;
};

struct ExperimentDerivation {
  double omega_sw = 0;
  double omega_d = 0;
  double Delta_a = 0;
  double omega_L = 0;
  double Delta0 = 0;
  double G0 = 0;
  double n_cav = 0;
  double E_L = 0;  // NaN when n_cav < 0
  bool consistent = true;
  std::string issue;
};

ExperimentDerivation experiment_derive(const ExperimentInputs& in);

/// x_zpf w_c / L with x_zpf = sqrt(hbar / (2 m w_m)).
double g0_from_zpf(double omega_c, double cavity_length, double mass, double omega_m);

}  // namespace qnoise
