#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "qnoise/spectrum.hpp"

namespace qnoise {

using cplx = std::complex<double>;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;

/// A scalar response evaluated at one angular frequency.
struct ComplexResponse {
  cplx value;
  double omega;
  operator cplx() const { return value; }
};

/// Cavity response 1/(kappa/2 - i w).
ComplexResponse chi_cavity(double omega, double kappa);

/// Full mechanical Lorentzian w_m/((w_m^2 - w^2) + i w gamma_m).
ComplexResponse chi_mech_lorentzian(double omega, double omega_m, double gamma_m);

/// Rotating-frame oscillator response 1/(gamma/2 - i w).
ComplexResponse chi_mech_rwa(double omega, double gamma);

/// Inverted-ensemble response -w_m/((w_m^2 - w^2 + Gamma^2/4) + i w Gamma).
/// drop_gamma_sq removes the Gamma^2/4 shift of the resonance.
ComplexResponse chi_negative_mass(double omega, double omega_m, double Gamma,
                                  bool drop_gamma_sq = false);

/// dx/dt = A x + B u with <u_j(t) u_k(t')> = C_jk delta(t - t').
struct LinearSystem {
  RMatrix drift;
  RMatrix noise_in;
  CMatrix corr;

  std::size_t dim() const { return static_cast<std::size_t>(drift.rows()); }
  std::size_t inputs() const { return static_cast<std::size_t>(noise_in.cols()); }
  /// Dimension, finiteness, hermiticity and positivity of the symmetrized correlation.
  void validate() const;
};

/// 2x2 correlation of a quadrature pair (X, P) of a thermal bath with occupation n.
CMatrix thermal_pair_corr(double n);

/// 2x2 correlation of (X, P) for a squeezed bath <a a> = M, <a^dag a> = N.
/// Requires |M|^2 <= N(N+1).
CMatrix squeezed_pair_corr(double N, cplx M);

/// Block-diagonal assembly of correlation blocks.
CMatrix block_diag(std::span<const CMatrix> blocks);

struct StabilityReport {
  bool stable = false;
  double max_real_part = 0;
  std::vector<cplx> eigenvalues;
};

/// Stable iff every eigenvalue has real part below -1e-12 * ||A||.
StabilityReport stability_check(const RMatrix& A);

/// Throws UnstableError with the eigenvalue list when the drift is not stable.
void require_stable(const RMatrix& A, const char* context);

/// T(w) = (-i w I - A)^{-1} B. Throws PoleError on a numerically singular resolvent.
CMatrix transfer_matrix(const LinearSystem& sys, double omega);

/// Reciprocal condition estimate of (-i w I - A), used for the near-pole warning.
double resolvent_rcond(const RMatrix& A, double omega);

struct MatrixSpectrum {
  std::vector<double> omegas;
  std::vector<CMatrix> values;
  /// Grid points whose resolvent condition number exceeded 1e12.
  std::vector<double> near_pole;

  Spectrum diagonal(std::size_t i, Normalization norm = Normalization::dimensionless) const;
};

/// Symmetrized spectral matrix S(w) = T(w) Re(C) T(w)^dag, which equals
/// 1/2 [T C T^dag + (T C T^dag at -w)^T] for a real drift.
MatrixSpectrum lti_spectrum(const LinearSystem& sys, std::span<const double> omegas);

/// Symmetrized spectrum of the scalar output y = c . x + d . u.
std::vector<double> output_spectrum(const LinearSystem& sys, const Eigen::VectorXd& c,
                                    const Eigen::VectorXd& d, std::span<const double> omegas);

/// Stationary covariance: A S + S A^T + B Re(C) B^T = 0.
RMatrix lyapunov_covariance(const LinearSystem& sys);

}  // namespace qnoise

namespace qnoise {

/// dx/dt = [A0 + cos(W t) Ac + sin(W t) As] x + B u, with a fixed input correlation.
struct PeriodicSystem {
  RMatrix A0;
  RMatrix Acos;
  RMatrix Asin;
  double modulation_omega = 0;  // W
  RMatrix noise_in;
  CMatrix corr;

  RMatrix drift_at(double t) const;
  void validate() const;
};

/// Floquet multipliers of the homogeneous part over one period, by RK4 on the monodromy matrix.
std::vector<cplx> floquet_multipliers(const PeriodicSystem& sys, int steps_per_period = 2000);

}  // namespace qnoise
