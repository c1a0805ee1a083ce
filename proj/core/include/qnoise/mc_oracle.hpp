#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "qnoise/lti.hpp"
#include "qnoise/spectrum.hpp"

namespace qnoise {

enum class Integrator { exact_ou, euler_maruyama };

struct PsdWindow {
  std::size_t segment_length = 1024;
  double overlap = 0.5;
};

/// Monte-Carlo run description. The classical noise covariance is Re(C).
struct SdeRun {
  std::variant<LinearSystem, PeriodicSystem> system;
  double dt = 0;
  double duration = 0;       // recorded time after burn-in
  double burn_in = -1;       // negative: ten relaxation times
  std::size_t n_trajectories = 1;
  std::uint64_t seed = 0;
  PsdWindow psd_window;
  Integrator integrator = Integrator::exact_ou;
  RMatrix observe;           // channels x dim; empty means the full state
  std::size_t sample_stride = 1;
  Eigen::VectorXd x0;        // empty means zero
  int substeps = 4;          // midpoint pieces per step for periodic drifts
  unsigned threads = 0;      // 0: hardware concurrency
};

struct Trajectories {
  double sample_dt = 0;
  /// One channels x samples matrix per trajectory.
  std::vector<RMatrix> paths;
};

/// Integrate every trajectory. Deterministic for a fixed seed regardless of thread count.
Trajectories simulate(const SdeRun& run);

/// Effective step after snapping to an integer number of steps per modulation period.
double effective_dt(const SdeRun& run);

/// Slowest decay time of the homogeneous dynamics.
double relaxation_time(const SdeRun& run);

struct PsdEstimate {
  std::vector<double> omegas;
  std::vector<double> mean;
  std::vector<double> std_error;
  std::size_t segments = 0;
  std::size_t trajectories = 0;

  Spectrum to_spectrum() const;
};

/// Welch estimate with a periodic Hann window, in the two-sided symmetrized convention.
PsdEstimate estimate_psd(const Trajectories& t, std::size_t channel, const PsdWindow& w);

/// Same as simulate + estimate_psd per channel without keeping the paths.
std::vector<PsdEstimate> simulate_psd(const SdeRun& run, const std::vector<std::size_t>& channels);

struct CovarianceEstimate {
  RMatrix mean;
  RMatrix std_error;
};

/// Time-averaged second moments of the observed channels, spread taken across trajectories.
CovarianceEstimate stationary_covariance(const Trajectories& t);

struct PsdComparison {
  std::size_t points = 0;
  std::size_t within = 0;
  double max_sigma = 0;
  std::vector<double> omegas;
  std::vector<double> sigma;

  double fraction() const { return points ? static_cast<double>(within) / points : 0.0; }
};

/// Deviation in standard errors on about n_points bins spread evenly over [omega_min, omega_max].
PsdComparison compare_psd(const PsdEstimate& est, const std::function<double(double)>& analytic,
                          double omega_min, double omega_max, std::size_t n_points = 60,
                          double threshold = 3.0);

}  // namespace qnoise
