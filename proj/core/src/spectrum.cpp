#include "qnoise/spectrum.hpp"

#include <cmath>

#include "qnoise/constants.hpp"
#include "qnoise/errors.hpp"

namespace qnoise {

double bose_occupation(double omega, double temperature) {
  if (temperature < 0) throw InputError("temperature must be >= 0");
  if (temperature == 0) return 0.0;
  const double x = constants::hbar * std::abs(omega) / (constants::k_B * temperature);
  return 1.0 / std::expm1(x);
}

double classical_occupation(double omega, double temperature) {
  if (temperature < 0) throw InputError("temperature must be >= 0");
  return constants::k_B * temperature / (constants::hbar * std::abs(omega));
}

std::string to_string(Normalization n) {
  switch (n) {
    case Normalization::dimensionless: return "dimensionless";
    case Normalization::per_gamma_m: return "per_gamma_m";
    case Normalization::newton_sq_per_hz: return "N^2/Hz";
  }
  return "unknown";
}

void check_grid(std::span<const double> omegas) {
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (!std::isfinite(omegas[i])) throw InputError("frequency grid contains a non-finite value");
    if (i > 0 && !(omegas[i] > omegas[i - 1]))
      throw InputError("frequency grid must be strictly increasing");
  }
}

Spectrum::Spectrum(std::vector<double> omegas, std::vector<double> values, Normalization norm)
    : omegas_(std::move(omegas)), values_(std::move(values)), norm_(norm) {
  if (omegas_.size() != values_.size()) throw InputError("spectrum grid/value size mismatch");
  check_grid(omegas_);
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0) throw InputError("spectrum values must be finite and >= 0");
  }
}

Spectrum Spectrum::rescaled(double factor, Normalization to) const {
  if (!(factor > 0) || !std::isfinite(factor)) throw InputError("rescale factor must be positive");
  std::vector<double> v(values_);
  for (double& x : v) x *= factor;
  return Spectrum(omegas_, std::move(v), to);
}

double force_noise_scale(double mass, double omega_m, double gamma_m) {
  return constants::hbar * mass * omega_m * gamma_m;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

}  // namespace qnoise
