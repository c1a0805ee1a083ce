#pragma once

#include <span>
#include <string>
#include <vector>

namespace qnoise {

enum class Normalization {
  dimensionless,     // force-noise units of the CQNC and parametric sections
  per_gamma_m,       // rate spectra divided by the mechanical damping
  newton_sq_per_hz,  // SI force noise
};

std::string to_string(Normalization n);

/// Real, nonnegative spectral values on a strictly increasing grid of angular frequencies.
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(std::vector<double> omegas, std::vector<double> values, Normalization norm);

  const std::vector<double>& omegas() const { return omegas_; }
  const std::vector<double>& values() const { return values_; }
  Normalization normalization() const { return norm_; }
  std::size_t size() const { return omegas_.size(); }

  /// Multiply every value by `factor` and retag. The caller owns the physics of the factor.
  Spectrum rescaled(double factor, Normalization to) const;

 private:
  std::vector<double> omegas_;
  std::vector<double> values_;
  Normalization norm_ = Normalization::dimensionless;
};

/// hbar m w_m gamma_m, the factor taking dimensionless force noise to N^2/Hz.
double force_noise_scale(double mass, double omega_m, double gamma_m);

std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Throws InputError unless the grid is finite and strictly increasing.
void check_grid(std::span<const double> omegas);

}  // namespace qnoise
