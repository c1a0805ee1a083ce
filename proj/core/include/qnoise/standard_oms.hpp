#pragma once

#include <span>

#include "qnoise/lti.hpp"
#include "qnoise/spectrum.hpp"

namespace qnoise {

/// Single-cavity optomechanical system. Rates in rad/s, Delta = w_c - w_L.
struct StandardOmsParams {
  double omega_m = 0;
  double gamma_m = 0;
  double kappa = 0;
  double g0 = 0;  // single-photon coupling
  double g = 0;   // drive-enhanced coupling g0 * alpha_ss
  double Delta = 0;
  double mass = 0;
  double temperature = 0;
  double cavity_length = 0;

  void validate() const;
};

/// Second-order filtered laser phase noise.
struct LpnParams {
  double Gamma_L = 0;      // linewidth
  double omega_N = 0;      // filter centre
  double gamma_tilde = 0;  // filter bandwidth

  void validate() const;
  bool active() const { return Gamma_L > 0; }
};

enum class ThermalModel { bose, classical };

/// n + 1/2 (bose) or k_B T / hbar w (classical).
double thermal_variance(double omega, double temperature, ThermalModel model);

/// g0 = (w_c / L) sqrt(hbar / (m w_m)).
double g0_from_geometry(double omega_c, double cavity_length, double mass, double omega_m);

/// h(w) = w_N^2 sqrt(2 Gamma_L) / ((w^2 - w_N^2) + i gamma~ w).
cplx lpn_response(double omega, const LpnParams& lpn);
double lpn_psd(double omega, const LpnParams& lpn);

/// C_eff(w) = (4 g^2 / kappa gamma_m) (1 - 2 i w / kappa)^-2.
cplx effective_cooperativity(double omega, const StandardOmsParams& p);

struct DetectedOptions {
  ThermalModel thermal = ThermalModel::bose;
  double S_ff = 0;  // signal force spectrum, same units as the result
};

/// Detected-force spectrum in rad/s units (resonant drive only).
double detected_spectrum_value(double omega, const StandardOmsParams& p, const LpnParams& lpn,
                               const DetectedOptions& opt = {});

/// Same, divided by gamma_m on a grid.
Spectrum detected_spectrum(std::span<const double> omegas, const StandardOmsParams& p,
                           const LpnParams& lpn, const DetectedOptions& opt = {});

/// Shot plus back-action terms for a given |C_eff|.
double quantum_noise_at(double omega, const StandardOmsParams& p, double c_abs);

/// 1/|chi_m(w)|, rad/s.
double sql(double omega, const StandardOmsParams& p);

/// |C_eff^opt(w)| = 1/(2 gamma_m |chi_m(w)|).
double optimal_cooperativity(double omega, const StandardOmsParams& p);

/// Optimized total noise: thermal + SQL + laser phase noise, rad/s.
double optimal_total_noise(double omega, const StandardOmsParams& p, const LpnParams& lpn,
                           ThermalModel thermal = ThermalModel::classical);

/// g_opt^2 = (kappa/4)/|chi_m(w)|.
double optimal_coupling_sq(double omega, const StandardOmsParams& p);

/// Dimensionless force noise of the bare cavity for |w| << kappa, resonant drive.
double standard_force_noise(double omega, const StandardOmsParams& p,
                            ThermalModel thermal = ThermalModel::classical);

/// T = 0, w = w_m form: (x^2 + 1/x^2)/2 with x = g/g_opt.
double standard_force_noise_normalized(double g_over_gopt);

/// R = kappa gamma_m |g chi_m chi_a|^2 with chi_a = 1/(kappa/2 + i w).
double standard_signal_power(double omega, const StandardOmsParams& p);

/// Linearized fluctuation system over (X, Y, q, p[, zeta, theta]).
/// Inputs are (X_in, Y_in, P_in[, eps]); the phase-noise block is included when lpn.active().
LinearSystem standard_oms_system(const StandardOmsParams& p, const LpnParams& lpn,
                                 ThermalModel thermal = ThermalModel::bose);

/// Y_out = Y_in - sqrt(kappa) Y as observation/feedthrough vectors for standard_oms_system.
std::pair<Eigen::VectorXd, Eigen::VectorXd> standard_oms_output(const StandardOmsParams& p,
                                                                const LpnParams& lpn);

/// Factor taking S_det to the phase-quadrature output spectrum: 2 gamma_m |C_eff| |chi_m|^2.
double detected_to_output_gain(double omega, const StandardOmsParams& p);

}  // namespace qnoise
