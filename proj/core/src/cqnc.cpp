#include "qnoise/cqnc.hpp"

#include <cmath>
#include <numbers>

#include "qnoise/constants.hpp"
#include "qnoise/errors.hpp"

namespace qnoise {

namespace {
constexpr cplx I{0.0, 1.0};

bool rel_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}
}  // namespace

void CqncParams::validate() const {
  if (!(omega_m > 0) || !(gamma_m > 0) || !(kappa > 0))
    throw InputError("cqnc: omega_m, gamma_m and kappa must be > 0");
  if (!(g >= 0) || !(G >= 0) || !(Gamma >= 0)) throw InputError("cqnc: g, G, Gamma must be >= 0");
  if (!(temperature >= 0) || !(n_d >= 0)) throw InputError("cqnc: temperature and n_d must be >= 0");
  if (!std::isfinite(Delta_c)) throw InputError("cqnc: Delta_c must be finite");
}

bool CqncParams::perfectly_matched() const { return rel_equal(g, G) && rel_equal(Gamma, gamma_m); }

SqueezedInput SqueezedInput::pure(double N, double phi) {
  if (!(N >= 0)) throw InputError("squeezing N must be >= 0");
  return {N, std::polar(std::sqrt(N * (N + 1.0)), phi)};
}

void SqueezedInput::validate() const {
  if (!(N >= 0)) throw InputError("squeezing N must be >= 0");
  if (std::norm(M) > N * (N + 1.0) * (1 + 1e-12) + 1e-300)
    throw InputError("squeezing requires |M|^2 <= N(N+1)");
}

PoutCoefficients output_phase_quadrature_coeffs(double omega, const CqncParams& p) {
  p.validate();
  PoutCoefficients c;
  c.chi_a = 1.0 / (p.kappa / 2.0 + I * omega);
  c.chi_m = chi_mech_lorentzian(omega, p.omega_m, p.gamma_m);
  c.chi_d = cplx(chi_negative_mass(omega, p.omega_m, p.Gamma, p.drop_gamma_sq));
  const cplx ba = p.g * p.g * c.chi_m + p.G * p.G * c.chi_d;
  const cplx inv = 1.0 / c.chi_a - c.chi_a * p.Delta_c * (ba - p.Delta_c);
  if (std::abs(inv) == 0) throw PoleError("modified cavity susceptibility has a pole on grid", omega);
  c.chi_a_eff = 1.0 / inv;
  const double sk = std::sqrt(p.kappa);
  c.force = -sk * c.chi_a_eff * p.g * c.chi_m * std::sqrt(p.gamma_m);
  c.p_a = p.kappa * c.chi_a_eff - 1.0;
  c.x_a = p.kappa * c.chi_a_eff * c.chi_a * (ba - p.Delta_c);
  const cplx atom = sk * c.chi_a_eff * p.G * c.chi_d * std::sqrt(p.Gamma);
  c.p_d = -atom;
  c.x_d = atom * (p.Gamma / 2.0 + I * omega) / p.omega_m;
  return c;
}

cplx backaction_sum(double omega, const CqncParams& p) {
  const cplx chi_m = chi_mech_lorentzian(omega, p.omega_m, p.gamma_m);
  const cplx chi_d = cplx(chi_negative_mass(omega, p.omega_m, p.Gamma, p.drop_gamma_sq));
  return p.g * p.g * chi_m + p.G * p.G * chi_d;
}

double force_noise_exact(double omega, const CqncParams& p, const SqueezedInput& sq,
                         ThermalModel thermal) {
  sq.validate();
  const auto c = output_phase_quadrature_coeffs(omega, p);
  if (std::abs(c.force) == 0) throw InputError("force coefficient vanishes (g = 0)");
  Eigen::RowVector4cd v;
  v << c.x_a / c.force, c.p_a / c.force, c.x_d / c.force, c.p_d / c.force;
  const CMatrix blocks[] = {squeezed_pair_corr(sq.N, sq.M), thermal_pair_corr(p.n_d)};
  const CMatrix C = block_diag(blocks).real().cast<cplx>();
  const double s = (v * C * v.adjoint())(0, 0).real();
  return thermal_variance(p.omega_m, p.temperature, thermal) + s;
}

double cqnc_floor(double omega, const CqncParams& p) {
  return 0.5 * (1.0 + (omega * omega + p.gamma_m * p.gamma_m / 4.0) / (p.omega_m * p.omega_m));
}

double squeezing_term(cplx M, double N, double y) {
  const double q = 0.5 + 2.0 * y * y;
  return N * q * q + 2.0 * y * M.imag() * (4.0 * y * y - 1.0) + M.real() * (8.0 * y * y - q * q);
}

double force_noise_spectrum_perfect(double omega, const CqncParams& p, const SqueezedInput& sq,
                                    ThermalModel thermal) {
  p.validate();
  sq.validate();
  if (!p.perfectly_matched()) throw InputError("perfect-CQNC spectrum needs g = G and Gamma = gamma_m");
  if (!(p.g > 0)) throw InputError("perfect-CQNC spectrum needs g > 0");
  const double chi2 = std::norm(cplx(chi_mech_lorentzian(omega, p.omega_m, p.gamma_m)));
  const double y = p.Delta_c / p.kappa;
  const double q = 0.5 + 2.0 * y * y;
  const double bracket = 0.5 * q * q + squeezing_term(sq.M, sq.N, y);
  return thermal_variance(p.omega_m, p.temperature, thermal) + cqnc_floor(omega, p) +
         p.kappa / (p.g * p.g * p.gamma_m) / chi2 * bracket;
}

double squeeze_a(double y) { return 2.0 * y * (1.0 - 4.0 * y * y); }

double squeeze_b(double y) {
  const double q = 0.5 + 2.0 * y * y;
  return q * q - 8.0 * y * y;
}

double squeeze_objective(cplx M, double N, double y) {
  const double q = 0.5 + 2.0 * y * y;
  const double phi = std::arg(M);
  return (N + 0.5) * q * q - std::abs(M) * (squeeze_a(y) * std::sin(phi) + squeeze_b(y) * std::cos(phi));
}

double phi_opt(double y) { return std::atan2(squeeze_a(y), squeeze_b(y)); }

double h_min(double N) {
  if (!(N >= 0)) throw InputError("h_min needs N >= 0");
  // N + 1/2 - sqrt(N(N+1)) written without cancellation
  return 0.25 * 0.25 / (N + 0.5 + std::sqrt(N * (N + 1.0)));
}

double shot_noise_optimized(double omega, const CqncParams& p, double N) {
  p.validate();
  if (!(p.g > 0)) throw InputError("shot_noise_optimized needs g > 0");
  const double chi2 = std::norm(cplx(chi_mech_lorentzian(omega, p.omega_m, p.gamma_m)));
  return p.kappa / (4.0 * p.g * p.g * p.gamma_m * chi2) * (4.0 * h_min(N));
}

cplx response_ratio(double omega, const CqncParams& p) {
  const cplx chi_m = chi_mech_lorentzian(omega, p.omega_m, p.gamma_m);
  const cplx chi_d = cplx(chi_negative_mass(omega, p.omega_m, p.Gamma, p.drop_gamma_sq));
  return chi_d / chi_m;
}

double force_noise_spectrum_mismatch(double omega, const CqncParams& p, const SqueezedInput& sq,
                                     ThermalModel thermal) {
  p.validate();
  sq.validate();
  if (p.Delta_c != 0) throw InputError("mismatch spectrum is defined for Delta_c = 0");
  if (!(p.g > 0)) throw InputError("mismatch spectrum needs g > 0");
  const cplx chi_m = chi_mech_lorentzian(omega, p.omega_m, p.gamma_m);
  const double chi2 = std::norm(chi_m);
  const double g2 = p.g * p.g;
  const cplx R = p.G == 0 ? cplx(0.0) : response_ratio(omega, p);
  const cplx res = 1.0 + (p.G * p.G / g2) * R;
  const double shot = p.kappa / (4.0 * g2 * p.gamma_m * chi2) * (sq.N + 0.5 - sq.M.real());
  const double ba = 4.0 * g2 / (p.kappa * p.gamma_m) * (sq.N + 0.5 + sq.M.real()) * std::norm(res);
  const double atoms = 0.5 * (p.G * p.G / g2) * (p.Gamma / p.gamma_m) * std::norm(R) *
                       (1.0 + (omega * omega + p.Gamma * p.Gamma / 4.0) / (p.omega_m * p.omega_m));
  // symmetrized cross term: only the Im M part survives
  const double cross = (2.0 * I * sq.M.imag() / (p.gamma_m * std::conj(chi_m)) * res).imag();
  return thermal_variance(p.omega_m, p.temperature, thermal) + shot + ba + atoms + cross;
}

double standard_force_noise_squeezed(double omega, const CqncParams& p, const SqueezedInput& sq,
                                     ThermalModel thermal) {
  CqncParams bare = p;
  bare.G = 0;
  bare.Delta_c = 0;
  return force_noise_spectrum_mismatch(omega, bare, sq, thermal);
}

double pump_rate(double P_L, const CqncParams& p) {
  if (!(P_L >= 0)) throw InputError("laser power must be >= 0");
  if (!(p.lambda_L > 0)) throw InputError("pump_rate needs lambda_L > 0");
  const double omega_L = constants::two_pi * constants::c_light / p.lambda_L;
  const double k_in = p.kappa_in > 0 ? p.kappa_in : p.kappa;
  return std::sqrt(P_L * k_in / (constants::hbar * omega_L));
}

CouplingFromPower power_to_coupling(double P_L, const CqncParams& p) {
  p.validate();
  if (!(p.g0 > 0)) throw InputError("power_to_coupling needs g0 > 0");
  const double E = pump_rate(P_L, p);
  const double K = p.G * p.G * p.omega_m / (p.Gamma * p.Gamma / 4.0 + p.omega_m * p.omega_m);
  const double h = p.kappa / 2.0;
  const double den = h * h + p.Delta_c * (p.Delta_c + K);
  if (!(den > 0)) throw UnstableError("mean-field equation has no stable solution", {}, 0.0);
  const double x = E * h / den;
  const double y = -(p.Delta_c + K) * x / h;
  const cplx alpha{x, y};
  return {alpha, 2.0 * p.g0 * std::abs(alpha)};
}

LinearSystem cqnc_system(const CqncParams& p, const SqueezedInput& sq, ThermalModel thermal) {
  p.validate();
  sq.validate();
  LinearSystem s;
  s.drift = RMatrix::Zero(6, 6);
  auto& A = s.drift;
  // mechanics (X, P)
  A(0, 1) = p.omega_m;
  A(1, 0) = -p.omega_m;
  A(1, 1) = -p.gamma_m;
  A(1, 4) = -p.g;
  // atoms (X_d, P_d); this block always carries the Gamma^2/4 resonance shift
  A(2, 2) = -p.Gamma / 2.0;
  A(2, 3) = -p.omega_m;
  A(3, 2) = p.omega_m;
  A(3, 3) = -p.Gamma / 2.0;
  A(3, 4) = -p.G;
  // cavity (X_a, P_a)
  A(4, 4) = -p.kappa / 2.0;
  A(4, 5) = p.Delta_c;
  A(5, 0) = -p.g;
  A(5, 2) = -p.G;
  A(5, 4) = -p.Delta_c;
  A(5, 5) = -p.kappa / 2.0;
  s.noise_in = RMatrix::Zero(6, 5);
  s.noise_in(1, 0) = std::sqrt(p.gamma_m);
  s.noise_in(4, 1) = std::sqrt(p.kappa);
  s.noise_in(5, 2) = std::sqrt(p.kappa);
  s.noise_in(2, 3) = std::sqrt(p.Gamma);
  s.noise_in(3, 4) = std::sqrt(p.Gamma);
  const CMatrix blocks[] = {CMatrix::Constant(1, 1, thermal_variance(p.omega_m, p.temperature, thermal)),
                            squeezed_pair_corr(sq.N, sq.M), thermal_pair_corr(p.n_d)};
  s.corr = block_diag(blocks);
  return s;
}

double force_noise_lti(double omega, const CqncParams& p, const SqueezedInput& sq,
                       ThermalModel thermal) {
  const LinearSystem s = cqnc_system(p, sq, thermal);
  const CMatrix T = transfer_matrix(s, omega);
  Eigen::RowVectorXcd v = std::sqrt(p.kappa) * T.row(5);
  v(2) -= 1.0;
  const cplx tf = v(0);
  if (std::abs(tf) == 0) throw InputError("force transfer vanishes (g = 0)");
  const CMatrix C = s.corr.real().cast<cplx>();
  const double s_out = (v * C * v.adjoint())(0, 0).real();
  return s_out / std::norm(tf);
}

}  // namespace qnoise
