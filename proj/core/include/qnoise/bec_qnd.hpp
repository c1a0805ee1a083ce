#pragma once

#include <span>

#include "qnoise/lti.hpp"
#include "qnoise/spectrum.hpp"

namespace qnoise {

/// Bogoliubov-mode parameters of a repulsive BEC side mode.
struct BogoliubovParams {
  double omega_R = 0;
  double omega_sw = 0;
  double omega_d = 0;      // 4 w_R + w_sw
  double Omega_plus = 0;   // w_d + w_sw/2
  double Omega_minus = 0;  // w_d - w_sw/2
  double chi_factor = 1;   // (Omega+/Omega-)^(1/4)
  double omega_m = 0;      // sqrt(Omega- Omega+)
  double G0 = 0;
  double G = 0;  // G0 / chi
};

BogoliubovParams bogoliubov_derive(double omega_R, double omega_sw, double G0);

/// Inverse of w_m(w_sw) for fixed recoil; requires w_m >= 4 w_R.
double omega_sw_for_omega_m(double omega_R, double omega_m);

/// Opto-atomic coupling G0 = sqrt(2N) U0 / 4 with U0 = g_a^2 / |Delta_a|.
double qnd_coupling_from_atoms(double n_atoms, double g_a, double Delta_a);

/// Resonant two-tone drive producing alpha(t) = alpha_max cos(w_m t).
struct QndDrive {
  double omega_m = 0;
  double kappa = 0;
  double gamma = 0;  // Bogoliubov damping
  double alpha_max = 0;
  double n_th_b = 0;

  double eta_max() const;  // alpha_max sqrt(kappa^2/4 + w_m^2)
  double phi() const;      // arctan(2 w_m / kappa)
  void validate() const;

  static QndDrive from_pump(double omega_m, double kappa, double gamma, double eta_max,
                            double n_th_b = 0);
};

struct MeanField {
  cplx beta0;
  cplx beta2;
  cplx beta_m2;
};

/// Exact nonzero Fourier components of the Bogoliubov mean field.
MeanField mean_field_fourier(double G, double alpha_max, double omega_m, double gamma);
/// gamma << w_m forms: -G a^2/2w_m, -G a^2/12w_m, +G a^2/4w_m.
MeanField mean_field_fourier_approx(double G, double alpha_max, double omega_m);

double n_bad(double omega, const QndDrive& d, double G);
double n_ba(double omega, const QndDrive& d, double G);
/// kappa << w_m forms at w = 0.
double n_bad_good_cavity(const QndDrive& d, double G);
double n_ba_good_cavity(const QndDrive& d, double G);

double spectrum_Q(double omega, const QndDrive& d, double G);
double spectrum_P(double omega, const QndDrive& d, double G);

/// Gain sqrt(kappa) G alpha_max chi_c(w).
cplx gain_coefficient(double omega, const QndDrive& d, double G);
/// Sideband-weighted Bogoliubov response A(w).
double sideband_response(double omega, const QndDrive& d);

struct QndOptions {
  /// Include the classical mean-field leakage terms in n_add.
  bool include_mean_field_leakage = true;
  /// Use the exact Fourier components (true) or their gamma << w_m forms.
  bool exact_mean_field = true;
};

double n_add(double omega, const QndDrive& d, double G, const QndOptions& opt = {});
double output_phase_spectrum_value(double omega, const QndDrive& d, double G,
                                   const QndOptions& opt = {});
Spectrum output_phase_spectrum(std::span<const double> omegas, const QndDrive& d, double G,
                               const QndOptions& opt = {});

/// On-resonance approximation 1/(16 n_BA) + (1/8) kappa^2/(4 w_m^2 + kappa^2/4) n_BA.
double n_add_resonance_approx(const QndDrive& d, double G);

/// Closed-form optimal pump amplitude. Throws for G = 0.
double optimal_pump(double omega_m, double kappa, double gamma, double G);

/// (sqrt2/4) kappa / sqrt(kappa^2 + 16 w_m^2).
double n_add_min(double omega_m, double kappa);

/// Numeric minimum of n_add(0) over eta_max (Brent on log eta). Returns {eta, value}.
std::pair<double, double> minimize_n_add_over_pump(double omega_m, double kappa, double gamma,
                                                   double G, const QndOptions& opt = {});

/// Lab-frame fluctuation equations over (X, Y, Q, P) at zero effective detuning,
/// inputs (X_in, Y_in, Q_in, P_in). Modulation at 2 w_m.
PeriodicSystem qnd_periodic_system(const QndDrive& d, double G);

/// Intracavity phase-quadrature spectrum implied by the output spectrum:
/// S_YY = (S_Yout - 1/2)/kappa + kappa |chi_c|^2 / 2.
double intracavity_phase_spectrum(double omega, const QndDrive& d, double G,
                                  const QndOptions& opt = {});

}  // namespace qnoise
