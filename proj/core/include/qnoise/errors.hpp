#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnoise {

/// Invalid parameter values or inconsistent dimensions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A drift matrix with an eigenvalue in the closed right half plane.
class UnstableError : public std::runtime_error {
 public:
  UnstableError(const std::string& what, std::vector<std::complex<double>> eigenvalues,
                double max_real_part);
  const std::vector<std::complex<double>>& eigenvalues() const { return eigenvalues_; }
  double max_real_part() const { return max_real_part_; }

 private:
  std::vector<std::complex<double>> eigenvalues_;
  double max_real_part_;
};

/// (-i w I - A) is numerically singular at a requested grid frequency.
class PoleError : public std::runtime_error {
 public:
  PoleError(const std::string& what, double omega);
  double omega() const { return omega_; }

 private:
  double omega_;
};

/// Target values that admit no physical solution (negative photon number etc).
class InconsistentTargetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qnoise
