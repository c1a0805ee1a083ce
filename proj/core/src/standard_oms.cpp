#include "qnoise/standard_oms.hpp"

#include <cmath>

#include "qnoise/constants.hpp"
#include "qnoise/errors.hpp"

namespace qnoise {

namespace {
constexpr cplx I{0.0, 1.0};

void require_resonant(const StandardOmsParams& p, const char* what) {
  if (p.Delta != 0.0) throw InputError(std::string(what) + " requires Delta = 0");
}
}  // namespace

double thermal_variance(double omega, double temperature, ThermalModel model) {
  return model == ThermalModel::bose ? bose_occupation(omega, temperature) + 0.5
                                     : classical_occupation(omega, temperature);
}

void StandardOmsParams::validate() const {
  if (!(omega_m > 0) || !(gamma_m > 0) || !(kappa > 0))
    throw InputError("standard OMS: omega_m, gamma_m and kappa must be > 0");
  if (!(g >= 0) || !(g0 >= 0)) throw InputError("standard OMS: couplings must be >= 0");
  if (!(temperature >= 0)) throw InputError("standard OMS: temperature must be >= 0");
  if (!std::isfinite(Delta)) throw InputError("standard OMS: Delta must be finite");
}

void LpnParams::validate() const {
  if (!(Gamma_L >= 0) || !(omega_N >= 0) || !(gamma_tilde >= 0))
    throw InputError("laser phase noise parameters must be >= 0");
}

double g0_from_geometry(double omega_c, double cavity_length, double mass, double omega_m) {
  if (!(cavity_length > 0) || !(mass > 0) || !(omega_m > 0))
    throw InputError("g0_from_geometry: length, mass and omega_m must be > 0");
  return omega_c / cavity_length * std::sqrt(constants::hbar / (mass * omega_m));
}

cplx lpn_response(double omega, const LpnParams& lpn) {
  lpn.validate();
  const double wn2 = lpn.omega_N * lpn.omega_N;
  const cplx den = (omega * omega - wn2) + I * lpn.gamma_tilde * omega;
  if (lpn.Gamma_L == 0) return 0.0;
  if (std::abs(den) == 0) throw PoleError("laser phase noise filter pole on grid", omega);
  return wn2 * std::sqrt(2.0 * lpn.Gamma_L) / den;
}

double lpn_psd(double omega, const LpnParams& lpn) {
  lpn.validate();
  if (lpn.Gamma_L == 0) return 0.0;
  const double wn2 = lpn.omega_N * lpn.omega_N;
  const double a = omega * omega - wn2;
  const double den = a * a + lpn.gamma_tilde * lpn.gamma_tilde * omega * omega;
  if (den == 0) throw PoleError("laser phase noise filter pole on grid", omega);
  return 2.0 * lpn.Gamma_L * wn2 * wn2 / den;
}

cplx effective_cooperativity(double omega, const StandardOmsParams& p) {
  p.validate();
  const cplx f = 1.0 - 2.0 * I * omega / p.kappa;
  return 4.0 * p.g * p.g / (p.kappa * p.gamma_m) / (f * f);
}

double quantum_noise_at(double omega, const StandardOmsParams& p, double c_abs) {
  const double chi2 = std::norm(cplx(chi_mech_lorentzian(omega, p.omega_m, p.gamma_m)));
  return 1.0 / (4.0 * p.gamma_m * chi2 * c_abs) + p.gamma_m * c_abs;
}

double detected_spectrum_value(double omega, const StandardOmsParams& p, const LpnParams& lpn,
                               const DetectedOptions& opt) {
  p.validate();
  require_resonant(p, "detected_spectrum");
  const double chi2 = std::norm(cplx(chi_mech_lorentzian(omega, p.omega_m, p.gamma_m)));
  const double c_abs = std::abs(effective_cooperativity(omega, p));
  if (!(c_abs > 0)) throw InputError("detected_spectrum requires g > 0");
  double s = quantum_noise_at(omega, p, c_abs);
  if (lpn.active()) {
    if (!(p.g0 > 0)) throw InputError("laser phase noise term requires g0 > 0");
    s += lpn_psd(omega, lpn) / (p.g0 * p.g0 * chi2);
  }
  s += opt.S_ff;
  s += 2.0 * p.gamma_m * thermal_variance(p.omega_m, p.temperature, opt.thermal);
  return s;
}

Spectrum detected_spectrum(std::span<const double> omegas, const StandardOmsParams& p,
                           const LpnParams& lpn, const DetectedOptions& opt) {
  std::vector<double> v;
  v.reserve(omegas.size());
  for (double w : omegas) v.push_back(detected_spectrum_value(w, p, lpn, opt) / p.gamma_m);
  return Spectrum({omegas.begin(), omegas.end()}, std::move(v), Normalization::per_gamma_m);
}

double sql(double omega, const StandardOmsParams& p) {
  return 1.0 / std::abs(cplx(chi_mech_lorentzian(omega, p.omega_m, p.gamma_m)));
}

double optimal_cooperativity(double omega, const StandardOmsParams& p) {
  return sql(omega, p) / (2.0 * p.gamma_m);
}

double optimal_total_noise(double omega, const StandardOmsParams& p, const LpnParams& lpn,
                           ThermalModel thermal) {
  p.validate();
  const double s_sql = sql(omega, p);
  double s = 2.0 * p.gamma_m * thermal_variance(p.omega_m, p.temperature, thermal) + s_sql;
  if (lpn.active()) {
    if (!(p.g0 > 0)) throw InputError("laser phase noise term requires g0 > 0");
    s += lpn_psd(omega, lpn) * s_sql * s_sql / (p.g0 * p.g0);
  }
  return s;
}

double optimal_coupling_sq(double omega, const StandardOmsParams& p) {
  return p.kappa / 4.0 * sql(omega, p);
}

double standard_force_noise(double omega, const StandardOmsParams& p, ThermalModel thermal) {
  p.validate();
  require_resonant(p, "standard_force_noise");
  if (!(p.g > 0)) throw InputError("standard_force_noise requires g > 0");
  const double chi2 = std::norm(cplx(chi_mech_lorentzian(omega, p.omega_m, p.gamma_m)));
  const double g2 = p.g * p.g;
  const double shot = 0.25 * p.kappa / (g2 * p.gamma_m) / chi2;
  const double ba = 4.0 * g2 / (p.kappa * p.gamma_m);
  return thermal_variance(p.omega_m, p.temperature, thermal) + 0.5 * (shot + ba);
}

double standard_force_noise_normalized(double x) {
  if (!(x > 0)) throw InputError("g/g_opt must be > 0");
  return 0.5 * (x * x + 1.0 / (x * x));
}

double standard_signal_power(double omega, const StandardOmsParams& p) {
  p.validate();
  require_resonant(p, "standard_signal_power");
  const cplx chi_a = 1.0 / (p.kappa / 2.0 + I * omega);
  const cplx chi_m = chi_mech_lorentzian(omega, p.omega_m, p.gamma_m);
  return p.kappa * p.gamma_m * std::norm(p.g * chi_m * chi_a);
}

LinearSystem standard_oms_system(const StandardOmsParams& p, const LpnParams& lpn,
                                 ThermalModel thermal) {
  p.validate();
  lpn.validate();
  const bool with_lpn = lpn.active();
  if (with_lpn && (!(p.g0 > 0) || !(lpn.omega_N > 0) || !(lpn.gamma_tilde > 0)))
    throw InputError("phase-noise block needs g0, omega_N and gamma_tilde > 0");
  const int n = with_lpn ? 6 : 4;
  const int m = with_lpn ? 4 : 3;
  const double r2 = std::sqrt(2.0);
  LinearSystem s;
  s.drift = RMatrix::Zero(n, n);
  auto& A = s.drift;
  A(0, 0) = -p.kappa / 2;
  A(0, 1) = p.Delta;
  A(1, 0) = -p.Delta;
  A(1, 1) = -p.kappa / 2;
  A(1, 2) = r2 * p.g;
  A(2, 3) = p.omega_m;
  A(3, 0) = r2 * p.g;
  A(3, 2) = -p.omega_m;
  A(3, 3) = -p.gamma_m;
  s.noise_in = RMatrix::Zero(n, m);
  s.noise_in(0, 0) = std::sqrt(p.kappa);
  s.noise_in(1, 1) = std::sqrt(p.kappa);
  s.noise_in(3, 2) = std::sqrt(2.0 * p.gamma_m);
  std::vector<CMatrix> blocks{thermal_pair_corr(0.0),
                              CMatrix::Constant(1, 1, thermal_variance(p.omega_m, p.temperature, thermal))};
  if (with_lpn) {
    A(1, 4) = r2 * p.g / p.g0;
    A(4, 5) = lpn.omega_N;
    A(5, 4) = -lpn.omega_N;
    A(5, 5) = -lpn.gamma_tilde;
    s.noise_in(5, 3) = lpn.omega_N * std::sqrt(2.0 * lpn.Gamma_L);
    blocks.push_back(CMatrix::Constant(1, 1, 1.0));
  }
  s.corr = block_diag(blocks);
  return s;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> standard_oms_output(const StandardOmsParams& p,
                                                                const LpnParams& lpn) {
  const int n = lpn.active() ? 6 : 4;
  const int m = lpn.active() ? 4 : 3;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(m);
  c(1) = -std::sqrt(p.kappa);
  d(1) = 1.0;
  return {c, d};
}

double detected_to_output_gain(double omega, const StandardOmsParams& p) {
  const double chi2 = std::norm(cplx(chi_mech_lorentzian(omega, p.omega_m, p.gamma_m)));
  return 2.0 * p.gamma_m * std::abs(effective_cooperativity(omega, p)) * chi2;
}

}  // namespace qnoise
