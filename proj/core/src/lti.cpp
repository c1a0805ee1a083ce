#include "qnoise/lti.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qnoise/errors.hpp"

namespace qnoise {

namespace {
constexpr cplx I{0.0, 1.0};
constexpr double kPoleRcond = 1e-15;
constexpr double kWarnRcond = 1e-12;

void require_positive(double v, const char* name) {
  if (!(v > 0) || !std::isfinite(v)) throw InputError(std::string(name) + " must be > 0");
}
}  // namespace

ComplexResponse chi_cavity(double omega, double kappa) {
  require_positive(kappa, "kappa");
  return {1.0 / (kappa / 2.0 - I * omega), omega};
}

ComplexResponse chi_mech_lorentzian(double omega, double omega_m, double gamma_m) {
  require_positive(omega_m, "omega_m");
  require_positive(gamma_m, "gamma_m");
  return {omega_m / ((omega_m * omega_m - omega * omega) + I * omega * gamma_m), omega};
}

ComplexResponse chi_mech_rwa(double omega, double gamma) {
  require_positive(gamma, "gamma");
  return {1.0 / (gamma / 2.0 - I * omega), omega};
}

ComplexResponse chi_negative_mass(double omega, double omega_m, double Gamma, bool drop_gamma_sq) {
  require_positive(omega_m, "omega_m");
  if (!(Gamma >= 0)) throw InputError("Gamma must be >= 0");
  const double shift = drop_gamma_sq ? 0.0 : Gamma * Gamma / 4.0;
  return {-omega_m / ((omega_m * omega_m - omega * omega + shift) + I * omega * Gamma), omega};
}

void LinearSystem::validate() const {
  const auto n = drift.rows();
  if (drift.cols() != n || n == 0) throw InputError("drift matrix must be square and non-empty");
  if (noise_in.rows() != n) throw InputError("noise_in row count must match the drift dimension");
  const auto m = noise_in.cols();
  if (corr.rows() != m || corr.cols() != m)
    throw InputError("corr must be square with one row per noise input");
  if (!drift.allFinite() || !noise_in.allFinite() || !corr.allFinite())
    throw InputError("linear system contains non-finite entries");
  const double scale = std::max(1.0, corr.cwiseAbs().maxCoeff());
  if ((corr - corr.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InputError("corr must be Hermitian");
  Eigen::SelfAdjointEigenSolver<RMatrix> es(corr.real());
  if (es.eigenvalues().minCoeff() < -1e-12 * scale)
    throw InputError("symmetrized noise correlation is not positive semidefinite");
}

CMatrix thermal_pair_corr(double n) {
  if (!(n >= 0)) throw InputError("thermal occupation must be >= 0");
  return squeezed_pair_corr(n, 0.0);
}

CMatrix squeezed_pair_corr(double N, cplx M) {
  if (!(N >= 0)) throw InputError("N must be >= 0");
  const double bound = N * (N + 1.0);
  if (std::norm(M) > bound * (1.0 + 1e-12) + 1e-300)
    throw InputError("squeezing requires |M|^2 <= N(N+1)");
  CMatrix c(2, 2);
  c(0, 0) = N + 0.5 + M.real();
  c(1, 1) = N + 0.5 - M.real();
  c(0, 1) = M.imag() + 0.5 * I;
  c(1, 0) = M.imag() - 0.5 * I;
  return c;
}

CMatrix block_diag(std::span<const CMatrix> blocks) {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  CMatrix out = CMatrix::Zero(n, n);
  Eigen::Index k = 0;
  for (const auto& b : blocks) {
    out.block(k, k, b.rows(), b.cols()) = b;
    k += b.rows();
  }
  return out;
}

StabilityReport stability_check(const RMatrix& A) {
  if (A.rows() != A.cols() || A.rows() == 0) throw InputError("stability_check needs a square matrix");
  if (!A.allFinite()) throw InputError("drift matrix contains non-finite entries");
  Eigen::EigenSolver<RMatrix> es(A, false);
  if (es.info() != Eigen::Success) throw InputError("eigenvalue solver failed");
  StabilityReport r;
  r.max_real_part = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    r.eigenvalues.push_back(es.eigenvalues()[i]);
    r.max_real_part = std::max(r.max_real_part, es.eigenvalues()[i].real());
  }
  const double tol = 1e-12 * A.norm();
  r.stable = r.max_real_part < -tol;
  return r;
}

void require_stable(const RMatrix& A, const char* context) {
  auto r = stability_check(A);
  if (!r.stable) {
    std::ostringstream os;
    os << context << ": drift matrix is unstable (max Re lambda = " << r.max_real_part << ")";
    throw UnstableError(os.str(), r.eigenvalues, r.max_real_part);
  }
}

namespace {
CMatrix resolvent_matrix(const RMatrix& A, double omega) {
  const auto n = A.rows();
  CMatrix M = -A.cast<cplx>();
  for (Eigen::Index i = 0; i < n; ++i) M(i, i) -= I * omega;
  return M;
}
}  // namespace

double resolvent_rcond(const RMatrix& A, double omega) {
  Eigen::PartialPivLU<CMatrix> lu(resolvent_matrix(A, omega));
  return lu.rcond();
}

namespace {
CMatrix solve_transfer(const LinearSystem& sys, double omega, double* rcond_out) {
  Eigen::PartialPivLU<CMatrix> lu(resolvent_matrix(sys.drift, omega));
  const double rc = lu.rcond();
  if (!(rc > kPoleRcond) || !std::isfinite(rc)) {
    std::ostringstream os;
    os << "resolvent is singular at omega = " << omega << " rad/s (pole on grid)";
    throw PoleError(os.str(), omega);
  }
  if (rcond_out) *rcond_out = rc;
  return lu.solve(sys.noise_in.cast<cplx>());
}
}  // namespace

CMatrix transfer_matrix(const LinearSystem& sys, double omega) {
  sys.validate();
  return solve_transfer(sys, omega, nullptr);
}

Spectrum MatrixSpectrum::diagonal(std::size_t i, Normalization norm) const {
  std::vector<double> v(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) v[k] = values[k](i, i).real();
  return Spectrum(omegas, std::move(v), norm);
}

MatrixSpectrum lti_spectrum(const LinearSystem& sys, std::span<const double> omegas) {
  sys.validate();
  check_grid(omegas);
  const RMatrix Csym = sys.corr.real();
  MatrixSpectrum out;
  out.omegas.assign(omegas.begin(), omegas.end());
  out.values.reserve(omegas.size());
  for (double w : omegas) {
    double rc = 1.0;
    const CMatrix T = solve_transfer(sys, w, &rc);
    if (rc < kWarnRcond) out.near_pole.push_back(w);
    CMatrix S = T * Csym.cast<cplx>() * T.adjoint();
    for (Eigen::Index i = 0; i < S.rows(); ++i) {
      double d = S(i, i).real();
      const double mag = std::max(1e-300, S.row(i).cwiseAbs().maxCoeff());
      if (d < 0) {
        if (d < -1e-10 * mag) {
          std::ostringstream os;
          os << "negative diagonal spectral value " << d << " at omega = " << w;
          throw InputError(os.str());
        }
        d = 0.0;
      }
      S(i, i) = d;
    }
    out.values.push_back(std::move(S));
  }
  return out;
}

std::vector<double> output_spectrum(const LinearSystem& sys, const Eigen::VectorXd& c,
                                    const Eigen::VectorXd& d, std::span<const double> omegas) {
  sys.validate();
  check_grid(omegas);
  if (static_cast<std::size_t>(c.size()) != sys.dim() ||
      static_cast<std::size_t>(d.size()) != sys.inputs())
    throw InputError("output_spectrum: observation vector size mismatch");
  const CMatrix Csym = sys.corr.real().cast<cplx>();
  std::vector<double> out;
  out.reserve(omegas.size());
  for (double w : omegas) {
    const CMatrix T = solve_transfer(sys, w, nullptr);
    Eigen::RowVectorXcd v = c.transpose().cast<cplx>() * T + d.transpose().cast<cplx>();
    const double s = (v * Csym * v.adjoint())(0, 0).real();
    out.push_back(std::max(0.0, s));
  }
  return out;
}

RMatrix lyapunov_covariance(const LinearSystem& sys) {
  sys.validate();
  require_stable(sys.drift, "lyapunov_covariance");
  const auto n = sys.drift.rows();
  const RMatrix Q = sys.noise_in * sys.corr.real() * sys.noise_in.transpose();
  const RMatrix Id = RMatrix::Identity(n, n);
  RMatrix K = RMatrix::Zero(n * n, n * n);
  // column-major vec: vec(A S) = (I kron A) vec S, vec(S A^T) = (A kron I) vec S
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      K.block(i * n, j * n, n, n) += Id(i, j) * sys.drift;
      K.block(i * n, j * n, n, n) += sys.drift(i, j) * Id;
    }
  Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(Q.data(), n * n);
  Eigen::VectorXd s = K.fullPivLu().solve(-q);
  RMatrix S = Eigen::Map<RMatrix>(s.data(), n, n);
  return 0.5 * (S + S.transpose());
}

}  // namespace qnoise

namespace qnoise {

RMatrix PeriodicSystem::drift_at(double t) const {
  const double ph = modulation_omega * t;
  return A0 + std::cos(ph) * Acos + std::sin(ph) * Asin;
}

void PeriodicSystem::validate() const {
  LinearSystem probe{A0, noise_in, corr};
  probe.validate();
  if (Acos.rows() != A0.rows() || Acos.cols() != A0.cols() || Asin.rows() != A0.rows() ||
      Asin.cols() != A0.cols())
    throw InputError("periodic system: modulation matrices must match the drift shape");
  if (!(modulation_omega > 0)) throw InputError("periodic system: modulation frequency must be > 0");
}

std::vector<cplx> floquet_multipliers(const PeriodicSystem& sys, int steps_per_period) {
  sys.validate();
  const double period = (2.0 * std::numbers::pi) / sys.modulation_omega;
  const double h = period / steps_per_period;
  RMatrix Phi = RMatrix::Identity(sys.A0.rows(), sys.A0.cols());
  for (int k = 0; k < steps_per_period; ++k) {
    const double t = k * h;
    const RMatrix k1 = sys.drift_at(t) * Phi;
    const RMatrix k2 = sys.drift_at(t + h / 2) * (Phi + h / 2 * k1);
    const RMatrix k3 = sys.drift_at(t + h / 2) * (Phi + h / 2 * k2);
    const RMatrix k4 = sys.drift_at(t + h) * (Phi + h * k3);
    Phi += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  Eigen::EigenSolver<RMatrix> es(Phi, false);
  std::vector<cplx> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()[i]);
  return out;
}

}  // namespace qnoise
