#include "qnoise/bec_qnd.hpp"

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>

#include "qnoise/errors.hpp"

namespace qnoise {

namespace {
constexpr cplx I{0.0, 1.0};

double sq_chi_c(double w, double kappa) { return std::norm(cplx(chi_cavity(w, kappa))); }
double sq_chi_m(double w, double gamma) { return std::norm(cplx(chi_mech_rwa(w, gamma))); }
}  // namespace

BogoliubovParams bogoliubov_derive(double omega_R, double omega_sw, double G0) {
  if (!(omega_R > 0)) throw InputError("omega_R must be > 0");
  if (!(omega_sw >= 0)) throw InputError("only repulsive condensates (omega_sw >= 0) are supported");
  BogoliubovParams b;
  b.omega_R = omega_R;
  b.omega_sw = omega_sw;
  b.omega_d = 4.0 * omega_R + omega_sw;
  b.Omega_plus = b.omega_d + omega_sw / 2.0;
  b.Omega_minus = b.omega_d - omega_sw / 2.0;
  if (!(b.Omega_minus > 0)) throw InputError("Omega_minus must be > 0");
  b.chi_factor = std::pow(b.Omega_plus / b.Omega_minus, 0.25);
  b.omega_m = std::sqrt(b.Omega_minus * b.Omega_plus);
  b.G0 = G0;
  b.G = G0 / b.chi_factor;
  return b;
}

double omega_sw_for_omega_m(double omega_R, double omega_m) {
  if (!(omega_R > 0)) throw InputError("omega_R must be > 0");
  if (omega_m < 4.0 * omega_R * (1 - 1e-15))
    throw InputError("omega_m below 4 omega_R needs an attractive condensate");
  // (3/4) s^2 + 8 w_R s + 16 w_R^2 - w_m^2 = 0
  const double s = (-8.0 * omega_R + std::sqrt(16.0 * omega_R * omega_R + 3.0 * omega_m * omega_m)) / 1.5;
  return std::max(0.0, s);
}

double qnd_coupling_from_atoms(double n_atoms, double g_a, double Delta_a) {
  if (Delta_a == 0) throw InputError("Delta_a must be nonzero");
  const double U0 = g_a * g_a / std::abs(Delta_a);
  return std::sqrt(2.0 * n_atoms) * U0 / 4.0;
}

double QndDrive::eta_max() const {
  return alpha_max * std::sqrt(kappa * kappa / 4.0 + omega_m * omega_m);
}

double QndDrive::phi() const { return std::atan(2.0 * omega_m / kappa); }

void QndDrive::validate() const {
  if (!(omega_m > 0) || !(kappa > 0) || !(gamma > 0))
    throw InputError("QND drive: omega_m, kappa and gamma must be > 0");
  if (!(alpha_max >= 0) || !(n_th_b >= 0)) throw InputError("QND drive: alpha_max, n_th must be >= 0");
}

QndDrive QndDrive::from_pump(double omega_m, double kappa, double gamma, double eta_max,
                             double n_th_b) {
  QndDrive d{omega_m, kappa, gamma, 0.0, n_th_b};
  d.alpha_max = eta_max / std::sqrt(kappa * kappa / 4.0 + omega_m * omega_m);
  d.validate();
  return d;
}

MeanField mean_field_fourier(double G, double alpha_max, double omega_m, double gamma) {
  const double a2 = alpha_max * alpha_max;
  MeanField m;
  m.beta0 = -I * G * a2 / (2.0 * (I * omega_m + gamma / 2.0));
  m.beta2 = -I * G * a2 / (4.0 * (3.0 * I * omega_m + gamma / 2.0));
  m.beta_m2 = -I * G * a2 / (4.0 * (-I * omega_m + gamma / 2.0));
  return m;
}

MeanField mean_field_fourier_approx(double G, double alpha_max, double omega_m) {
  const double a2 = alpha_max * alpha_max;
  return {-G * a2 / (2.0 * omega_m), -G * a2 / (12.0 * omega_m), G * a2 / (4.0 * omega_m)};
}

double n_bad(double omega, const QndDrive& d, double G) {
  d.validate();
  const double x = G * d.alpha_max;
  return d.kappa / (8.0 * d.gamma) * x * x *
         (sq_chi_c(omega + 2 * d.omega_m, d.kappa) + sq_chi_c(omega - 2 * d.omega_m, d.kappa));
}

double n_ba(double omega, const QndDrive& d, double G) {
  d.validate();
  const double x = G * d.alpha_max;
  return d.kappa / (2.0 * d.gamma) * x * x * sq_chi_c(omega, d.kappa);
}

double n_bad_good_cavity(const QndDrive& d, double G) {
  const double x = G * d.alpha_max;
  return d.kappa * x * x / (16.0 * d.gamma * d.omega_m * d.omega_m);
}

double n_ba_good_cavity(const QndDrive& d, double G) {
  const double x = G * d.alpha_max;
  return 2.0 * x * x / (d.kappa * d.gamma);
}

double spectrum_Q(double omega, const QndDrive& d, double G) {
  return d.gamma * sq_chi_m(omega, d.gamma) * (0.5 + d.n_th_b + n_bad(omega, d, G));
}

double spectrum_P(double omega, const QndDrive& d, double G) {
  return d.gamma * sq_chi_m(omega, d.gamma) *
         (0.5 + d.n_th_b + n_bad(omega, d, G) + n_ba(omega, d, G));
}

cplx gain_coefficient(double omega, const QndDrive& d, double G) {
  return std::sqrt(d.kappa) * G * d.alpha_max * cplx(chi_cavity(omega, d.kappa));
}

double sideband_response(double omega, const QndDrive& d) {
  d.validate();
  return d.gamma * sq_chi_m(omega, d.gamma) +
         d.gamma / 2.0 *
             (sq_chi_m(omega + 2 * d.omega_m, d.gamma) + sq_chi_m(omega - 2 * d.omega_m, d.gamma));
}

double n_add(double omega, const QndDrive& d, double G, const QndOptions& opt) {
  d.validate();
  const double A = sideband_response(omega, d);
  const double gain2 = std::norm(gain_coefficient(omega, d, G));
  if (gain2 == 0) return std::numeric_limits<double>::infinity();
  const double side_m = sq_chi_m(omega + 2 * d.omega_m, d.gamma) + sq_chi_m(omega - 2 * d.omega_m, d.gamma);
  double n = 1.0 / (2.0 * gain2 * A) + n_bad(omega, d, G) +
             d.gamma * n_ba(omega, d, G) / (4.0 * A) * side_m;
  if (opt.include_mean_field_leakage) {
    const MeanField b = opt.exact_mean_field ? mean_field_fourier(G, d.alpha_max, d.omega_m, d.gamma)
                                             : mean_field_fourier_approx(G, d.alpha_max, d.omega_m);
    const double b00 = (std::conj(b.beta0) * std::conj(b.beta0)).real();
    const double b2m2 = (std::conj(b.beta2) * std::conj(b.beta_m2)).real();
    const double side_c =
        sq_chi_c(omega + 2 * d.omega_m, d.kappa) + sq_chi_c(omega - 2 * d.omega_m, d.kappa);
    n += d.kappa / (2.0 * d.alpha_max * d.alpha_max * A) *
         (b00 * sq_chi_c(omega, d.kappa) + b2m2 * side_c);
  }
  return n;
}

double output_phase_spectrum_value(double omega, const QndDrive& d, double G,
                                   const QndOptions& opt) {
  const double gain2 = std::norm(gain_coefficient(omega, d, G));
  const double A = sideband_response(omega, d);
  if (gain2 == 0) return 0.5;  // vacuum reflected off an uncoupled cavity
  return gain2 * A * (0.5 + d.n_th_b + n_add(omega, d, G, opt));
}

Spectrum output_phase_spectrum(std::span<const double> omegas, const QndDrive& d, double G,
                               const QndOptions& opt) {
  std::vector<double> v;
  v.reserve(omegas.size());
  for (double w : omegas) v.push_back(output_phase_spectrum_value(w, d, G, opt));
  return Spectrum({omegas.begin(), omegas.end()}, std::move(v), Normalization::dimensionless);
}

double n_add_resonance_approx(const QndDrive& d, double G) {
  const double nba = n_ba(0.0, d, G);
  const double k2 = d.kappa * d.kappa;
  return 1.0 / (16.0 * nba) + 0.125 * k2 / (4.0 * d.omega_m * d.omega_m + k2 / 4.0) * nba;
}

double optimal_pump(double omega_m, double kappa, double gamma, double G) {
  if (G == 0) throw InputError("optimal_pump is undefined for G = 0");
  const double w2 = omega_m * omega_m;
  const double k2 = kappa * kappa;
  const double inner = gamma * (w2 + k2 / 4.0) * std::sqrt(4.0 * w2 + k2 / 4.0) /
                       (2.0 * std::sqrt(2.0) * G * G);
  return std::sqrt(inner);
}

double n_add_min(double omega_m, double kappa) {
  if (!(kappa > 0) || !(omega_m >= 0)) throw InputError("n_add_min: kappa > 0, omega_m >= 0");
  return std::sqrt(2.0) / 4.0 * kappa / std::sqrt(kappa * kappa + 16.0 * omega_m * omega_m);
}

std::pair<double, double> minimize_n_add_over_pump(double omega_m, double kappa, double gamma,
                                                   double G, const QndOptions& opt) {
  const double eta0 = optimal_pump(omega_m, kappa, gamma, G);
  auto f = [&](double log_eta) {
    return n_add(0.0, QndDrive::from_pump(omega_m, kappa, gamma, std::exp(log_eta)), G, opt);
  };
  const auto r = boost::math::tools::brent_find_minima(f, std::log(eta0) - std::log(1e3),
                                                       std::log(eta0) + std::log(1e3), 52);
  return {std::exp(r.first), r.second};
}

PeriodicSystem qnd_periodic_system(const QndDrive& d, double G) {
  d.validate();
  const double x = G * d.alpha_max;
  PeriodicSystem s;
  s.A0 = RMatrix::Zero(4, 4);
  s.Acos = RMatrix::Zero(4, 4);
  s.Asin = RMatrix::Zero(4, 4);
  s.A0(0, 0) = -d.kappa / 2;
  s.A0(1, 1) = -d.kappa / 2;
  s.A0(2, 2) = -d.gamma / 2;
  s.A0(3, 3) = -d.gamma / 2;
  s.A0(1, 2) = -x;
  s.Acos(1, 2) = -x;
  s.Asin(1, 3) = -x;
  s.Asin(2, 0) = x;
  s.A0(3, 0) = -x;
  s.Acos(3, 0) = -x;
  s.modulation_omega = 2.0 * d.omega_m;
  s.noise_in = RMatrix::Zero(4, 4);
  s.noise_in(0, 0) = std::sqrt(d.kappa);
  s.noise_in(1, 1) = std::sqrt(d.kappa);
  s.noise_in(2, 2) = std::sqrt(d.gamma);
  s.noise_in(3, 3) = std::sqrt(d.gamma);
  const CMatrix blocks[] = {thermal_pair_corr(0.0), thermal_pair_corr(d.n_th_b)};
  s.corr = block_diag(blocks);
  return s;
}

double intracavity_phase_spectrum(double omega, const QndDrive& d, double G,
                                  const QndOptions& opt) {
  const double s_out = output_phase_spectrum_value(omega, d, G, opt);
  return (s_out - 0.5) / d.kappa + d.kappa * sq_chi_c(omega, d.kappa) / 2.0;
}

}  // namespace qnoise
