#include "qnoise/parametric.hpp"

#include <cmath>
#include <limits>

#include "qnoise/constants.hpp"
#include "qnoise/errors.hpp"

namespace qnoise {

namespace {
constexpr cplx I{0.0, 1.0};

void require_finite_nonneg(double v, const char* name) {
  if (!std::isfinite(v) || v < 0) throw InputError(std::string("parametric: ") + name + " must be finite and >= 0");
}
}  // namespace

void HybridParams::validate() const {
  if (!(kappa > 0) || !(gamma_m > 0) || !(gamma_d > 0))
    throw InputError("parametric: kappa, gamma_m, gamma_d must be > 0");
  require_finite_nonneg(g, "g");
  require_finite_nonneg(G, "G");
  require_finite_nonneg(xi_m, "xi_m");
  require_finite_nonneg(xi_d, "xi_d");
  require_finite_nonneg(n_c, "n_c");
  require_finite_nonneg(n_m, "n_m");
  require_finite_nonneg(n_d, "n_d");
  require_finite_nonneg(omega_m, "omega_m");
  require_finite_nonneg(mass, "mass");
}

HybridParams HybridParams::from_cooperativities(double C0, double C1, double xi_m, double xi_d,
                                                double kappa, double gamma_m, double gamma_d,
                                                double omega_m, double mass) {
  if (!(C0 >= 0) || !(C1 >= 0)) throw InputError("parametric: cooperativities must be >= 0");
  HybridParams p;
  p.kappa = kappa;
  p.gamma_m = gamma_m;
  p.gamma_d = gamma_d;
  p.g = std::sqrt(C0 * kappa * gamma_m / 4.0);
  p.G = std::sqrt(C1 * kappa * gamma_d / 4.0);
  p.xi_m = xi_m;
  p.xi_d = xi_d;
  p.omega_m = omega_m;
  p.mass = mass;
  p.validate();
  return p;
}

Cooperativities cooperativities(const HybridParams& p) {
  p.validate();
  Cooperativities c;
  c.C0 = 4.0 * p.g * p.g / (p.kappa * p.gamma_m);
  c.C1 = 4.0 * p.G * p.G / (p.kappa * p.gamma_d);
  const double am = 1.0 + c.C1 - p.xi_d * p.xi_d;
  const double dm = am * am - p.xi_d * p.xi_d * c.C1 * c.C1;
  const double ad = 1.0 + c.C0 - p.xi_m * p.xi_m;
  const double dd = ad * ad - p.xi_m * p.xi_m * c.C0 * c.C0;
  if (dm == 0 || dd == 0) throw InputError("parametric: collective cooperativity denominator vanishes");
  c.Cm = c.C0 * am / dm;
  c.Cd = c.C1 * ad / dd;
  return c;
}

BecDerived bec_derive(double n_atoms, double g_a, double Delta_a, double omega_R, double omega_sw,
                      double Gamma_a) {
  if (Delta_a == 0 || !std::isfinite(Delta_a)) throw InputError("bec_derive: Delta_a must be nonzero");
  if (!(n_atoms >= 0)) throw InputError("bec_derive: N must be >= 0");
  BecDerived b;
  b.U0 = -g_a * g_a / Delta_a;
  b.delta0 = n_atoms * b.U0 / 2.0;
  b.G0 = std::sqrt(2.0 * n_atoms) * b.U0 / 4.0;
  b.omega_sw = omega_sw;
  b.omega_d = 4.0 * omega_R + omega_sw;
  b.g_CK = b.U0 / 2.0;
  b.dispersive = Gamma_a <= 0 || std::abs(Delta_a) > 100.0 * Gamma_a;
  if (!(b.omega_d > 0)) throw InputError("bec_derive: omega_d = 4 w_R + w_sw must be > 0");
  return b;
}

LinearSystem build_drift(const HybridParams& p) {
  p.validate();
  const double k2 = p.kappa / 2.0;
  const double lm = p.lambda_m(), ld = p.lambda_d();
  LinearSystem s;
  s.drift = RMatrix::Zero(6, 6);
  auto& A = s.drift;
  A(0, 0) = -k2;
  A(0, 3) = -p.g;
  A(0, 5) = p.G;
  A(1, 1) = -k2;
  A(1, 2) = p.g;
  A(1, 4) = -p.G;
  A(2, 1) = -p.g;
  A(2, 2) = lm - p.gamma_m / 2.0;
  A(3, 0) = p.g;
  A(3, 3) = -(lm + p.gamma_m / 2.0);
  A(4, 1) = p.G;
  A(4, 4) = ld - p.gamma_d / 2.0;
  A(5, 0) = -p.G;
  A(5, 5) = -(ld + p.gamma_d / 2.0);
  Eigen::VectorXd b(6);
  b << std::sqrt(p.kappa), std::sqrt(p.kappa), std::sqrt(p.gamma_m), std::sqrt(p.gamma_m),
      std::sqrt(p.gamma_d), std::sqrt(p.gamma_d);
  s.noise_in = b.asDiagonal();
  const CMatrix blocks[] = {thermal_pair_corr(p.n_c), thermal_pair_corr(p.n_m),
                            thermal_pair_corr(p.n_d)};
  s.corr = block_diag(blocks);
  return s;
}

LambdaMax lambda_max(const HybridParams& p) {
  const auto c = cooperativities(p);
  return {p.gamma_m / 2.0 * (1.0 + c.Cm), p.gamma_d / 2.0 * (1.0 + c.Cd)};
}

double drift_zero_crossing_xi_m(double C0, double C1, double xi_d) {
  const double den = 1.0 + C1 - xi_d;
  if (den == 0) throw InputError("parametric: 1 + C1 - xi_d vanishes");
  return 1.0 + C0 * (1.0 - xi_d) / den;
}

Susceptibilities susceptibility_elements(double omega, const HybridParams& p) {
  p.validate();
  const cplx inv0 = p.kappa / 2.0 - I * omega;
  const cplx chim = 1.0 / (p.gamma_m / 2.0 - p.lambda_m() - I * omega);
  const cplx chid = 1.0 / (p.gamma_d / 2.0 - p.lambda_d() - I * omega);
  if (!std::isfinite(std::abs(chim)) || !std::isfinite(std::abs(chid)))
    throw PoleError("parametric: modulated oscillator response has a pole on grid", omega);
  const cplx den = inv0 + p.g * p.g * chim + p.G * p.G * chid;
  if (std::abs(den) == 0) throw PoleError("parametric: chi22 has a pole on grid", omega);
  Susceptibilities s;
  s.chi22 = 1.0 / den;
  s.chi23 = p.g / (inv0 / chim + p.g * p.g + p.G * p.G * chid / chim);
  s.chi25 = -p.G / (inv0 / chid + p.G * p.G + p.g * p.g * chim / chid);
  return s;
}

ResponseNoise response_and_noise(double omega, const HybridParams& p, const ParametricOptions& opt) {
  if (opt.require_stable) require_stable(build_drift(p).drift, "parametric response");
  const auto s = susceptibility_elements(omega, p);
  const cplx A = 1.0 - p.kappa * s.chi22;
  const cplx B = std::sqrt(p.kappa * p.gamma_m) * s.chi23;
  const cplx D = std::sqrt(p.kappa * p.gamma_d) * s.chi25;
  const double b2 = std::norm(B);
  if (b2 == 0) throw InputError("parametric: chi23 vanishes, n_add undefined (signal blind spot)");
  ResponseNoise r;
  r.R_m = b2;
  r.n_add = ((p.n_c + 0.5) * std::norm(A) + (p.n_d + 0.5) * std::norm(D)) / b2;
  return r;
}

double optical_gain_root(double C0, double C1, double xi_m, double xi_d) {
  const double u = 1.0 - xi_m, v = 1.0 - xi_d;
  if (v == 0) throw InputError("parametric: xi_d = 1 makes the atomic response singular at w = 0");
  const double atom = C1 * u / v;
  const double den = C0 + u + atom;
  if (den == 0) throw PoleError("parametric: optical gain denominator vanishes", 0.0);
  return (C0 - u + atom) / den;
}

ResponseNoise resonance_closed_form(const HybridParams& p) {
  const auto c = cooperativities(p);
  if (c.C0 == 0) throw InputError("parametric: C0 = 0 leaves no mechanical signal");
  const double u = 1.0 - p.xi_m, v = 1.0 - p.xi_d;
  const double sg = optical_gain_root(c.C0, c.C1, p.xi_m, p.xi_d);
  const double one_minus = 1.0 - sg;
  ResponseNoise r;
  r.R_m = c.C0 * one_minus * one_minus / (u * u);
  r.n_add = u * u / c.C0 *
            (sg * sg / (one_minus * one_minus) * (p.n_c + 0.5) + c.C1 / (v * v) * (p.n_d + 0.5));
  return r;
}

ResponseNoise off_modulation_closed_form(double C0, double C1, double n_c, double n_d) {
  if (!(C0 > 0) || !(C1 >= 0)) throw InputError("parametric: need C0 > 0 and C1 >= 0");
  const double s = C0 + C1 - 1.0;
  const double t = 1.0 + C0 + C1;
  return {4.0 * C0 / (t * t), (s * s / 4.0 * (n_c + 0.5) + C1 * (n_d + 0.5)) / C0};
}

double impedance_match(double C0, double C1, double xi_d) {
  return impedance_solve(ImpedanceUnknown::xi_m, C0, C1, 0.0, xi_d);
}

// The numerator of the optical gain, C0 - u + C1 u / v, is linear in C0, C1, u and in 1/v.
double impedance_solve(ImpedanceUnknown which, double C0, double C1, double xi_m, double xi_d) {
  const double u = 1.0 - xi_m, v = 1.0 - xi_d;
  switch (which) {
    case ImpedanceUnknown::xi_m: {
      if (v == 0) throw InputError("impedance: xi_d = 1 is singular");
      const double den = 1.0 - C1 / v;
      if (den == 0) throw InputError("impedance: 1 - C1/(1 - xi_d) vanishes");
      return 1.0 - C0 / den;
    }
    case ImpedanceUnknown::C0:
      if (v == 0) throw InputError("impedance: xi_d = 1 is singular");
      return u * (1.0 - C1 / v);
    case ImpedanceUnknown::C1:
      if (u == 0) throw InputError("impedance: xi_m = 1 is singular");
      return v * (1.0 - C0 / u);
    case ImpedanceUnknown::xi_d: {
      if (u == 0) throw InputError("impedance: xi_m = 1 is singular");
      const double den = 1.0 - C0 / u;
      if (den == 0) throw InputError("impedance: 1 - C0/(1 - xi_m) vanishes");
      return 1.0 - C1 / den;
    }
  }
  throw InputError("impedance: unknown selector");
}

double force_noise(double omega, const HybridParams& p, const ParametricOptions& opt) {
  if (!(p.mass > 0) || !(p.omega_m > 0)) throw InputError("parametric: force noise needs mass and omega_m");
  const auto r = response_and_noise(omega, p, opt);
  return p.mass * constants::hbar * p.omega_m * p.gamma_m * ((p.n_m + 0.5) + r.n_add);
}

double sensitivity(double omega, const HybridParams& p, const ParametricOptions& opt) {
  return std::sqrt(force_noise(omega, p, opt));
}

double snr(double omega, const HybridParams& p, double F_tilde, const ParametricOptions& opt) {
  return std::abs(F_tilde) / sensitivity(omega, p, opt);
}

double g0_from_zpf(double omega_c, double cavity_length, double mass, double omega_m) {
  if (!(cavity_length > 0) || !(mass > 0) || !(omega_m > 0))
    throw InputError("g0: length, mass and omega_m must be > 0");
  return std::sqrt(constants::hbar / (2.0 * mass * omega_m)) * omega_c / cavity_length;
}

ExperimentDerivation experiment_derive(const ExperimentInputs& in) {
  if (!(in.C0 > 0) || !(in.C1 > 0)) throw InputError("derive: C0 and C1 must be > 0");
  if (!(in.n_atoms > 0) || !(in.g0 > 0) || !(in.gamma_m > 0) || !(in.gamma_d > 0))
    throw InputError("derive: N, g0, gamma_m, gamma_d must be > 0");
  ExperimentDerivation d;
  d.omega_sw = in.omega_m - 4.0 * in.omega_R;
  d.omega_d = 4.0 * in.omega_R + d.omega_sw;
  d.Delta_a = -(in.g_a * in.g_a / in.g0) *
              std::sqrt(in.n_atoms * in.gamma_m * in.C0 / (8.0 * in.gamma_d * in.C1));
  d.omega_L = in.omega_a - d.Delta_a;
  const auto bec = bec_derive(in.n_atoms, in.g_a, d.Delta_a, in.omega_R, d.omega_sw);
  d.G0 = bec.G0;
  d.Delta0 = in.omega_c - d.omega_L - in.n_atoms * in.g_a * in.g_a / (2.0 * d.Delta_a);
  d.n_cav = (in.omega_m * d.Delta0 - in.omega_m * in.omega_m) / (2.0 * (in.g0 * in.g0 + d.G0 * d.G0));
  if (d.omega_sw <= 0) {
    d.consistent = false;
    d.issue = "omega_sw = omega_m - 4 omega_R is not positive";
  }
  if (d.n_cav < 0) {
    d.consistent = false;
    d.issue = "negative intracavity photon number (Delta0 = " + std::to_string(d.Delta0) +
              " rad/s is below omega_m)";
    d.E_L = std::numeric_limits<double>::quiet_NaN();
  } else {
    d.E_L = std::sqrt(d.n_cav * (in.kappa * in.kappa / 4.0 + in.omega_m * in.omega_m));
  }
  return d;
}

}  // namespace qnoise
