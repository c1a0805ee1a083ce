#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "qnoise/errors.hpp"
#include "qnoise/mc_oracle.hpp"

namespace qnoise {

namespace {

// Planning is not thread safe in FFTW; execution on a shared plan with new arrays is.
std::mutex plan_mutex;

class R2cPlan {
 public:
  explicit R2cPlan(std::size_t n) : n_(n) {
    std::lock_guard lock(plan_mutex);
    double* in = fftw_alloc_real(n);
    fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
  }
  ~R2cPlan() {
    std::lock_guard lock(plan_mutex);
    fftw_destroy_plan(plan_);
  }
  R2cPlan(const R2cPlan&) = delete;
  R2cPlan& operator=(const R2cPlan&) = delete;

  void run(double* in, fftw_complex* out) const { fftw_execute_dft_r2c(plan_, in, out); }

 private:
  std::size_t n_;
  fftw_plan plan_;
};

}  // namespace

PsdEstimate estimate_psd(const Trajectories& t, std::size_t channel, const PsdWindow& w) {
  if (t.paths.empty()) throw InputError("estimate_psd: no trajectories");
  const std::size_t L = w.segment_length;
  if (L < 8 || L % 2) throw InputError("estimate_psd: segment length must be even and >= 8");
  if (!(w.overlap >= 0 && w.overlap < 1)) throw InputError("estimate_psd: overlap must be in [0, 1)");
  const std::size_t hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(L * (1.0 - w.overlap))));
  const auto& first = t.paths.front();
  if (channel >= static_cast<std::size_t>(first.rows())) throw InputError("estimate_psd: channel out of range");
  const std::size_t n = static_cast<std::size_t>(first.cols());
  if (n < L) throw InputError("estimate_psd: run shorter than one segment");
  const std::size_t nseg = 1 + (n - L) / hop;
  if (nseg < 8) throw InputError("estimate_psd: fewer than 8 segments, run too short");

  std::vector<double> win(L);
  double wsum = 0;
  for (std::size_t i = 0; i < L; ++i) {
    win[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / L));
    wsum += win[i] * win[i];
  }
  const std::size_t nbins = L / 2 + 1;
  const double scale = t.sample_dt / wsum;

  R2cPlan plan(L);
  std::vector<double> buf(L);
  std::vector<fftw_complex> spec(nbins);

  PsdEstimate e;
  e.segments = nseg;
  e.trajectories = t.paths.size();
  e.omegas.resize(nbins);
  for (std::size_t k = 0; k < nbins; ++k) e.omegas[k] = 2.0 * std::numbers::pi * k / (L * t.sample_dt);

  std::vector<double> sum(nbins, 0.0), sumsq(nbins, 0.0);
  std::vector<double> traj(nbins);
  for (const auto& path : t.paths) {
    if (static_cast<std::size_t>(path.cols()) != n) throw InputError("estimate_psd: ragged trajectories");
    std::fill(traj.begin(), traj.end(), 0.0);
    std::vector<double> segsum(nbins, 0.0), segsq(nbins, 0.0);
    for (std::size_t s = 0; s < nseg; ++s) {
      for (std::size_t i = 0; i < L; ++i)
        buf[i] = win[i] * path(static_cast<Eigen::Index>(channel), static_cast<Eigen::Index>(s * hop + i));
      plan.run(buf.data(), spec.data());
      for (std::size_t k = 0; k < nbins; ++k) {
        const double p = scale * (spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1]);
        segsum[k] += p;
        segsq[k] += p * p;
      }
    }
    for (std::size_t k = 0; k < nbins; ++k) {
      traj[k] = segsum[k] / nseg;
      sum[k] += traj[k];
      sumsq[k] += traj[k] * traj[k];
      if (t.paths.size() == 1) {
        // Single path: segment spread, which ignores the overlap correlation.
        const double var = std::max(0.0, segsq[k] / nseg - traj[k] * traj[k]);
        sumsq[k] = var / nseg;
      }
    }
  }
  const double m = static_cast<double>(t.paths.size());
  e.mean.resize(nbins);
  e.std_error.resize(nbins);
  for (std::size_t k = 0; k < nbins; ++k) {
    e.mean[k] = sum[k] / m;
    if (t.paths.size() == 1) {
      e.std_error[k] = std::sqrt(sumsq[k]);
    } else {
      const double var = std::max(0.0, (sumsq[k] - m * e.mean[k] * e.mean[k]) / (m - 1.0));
      e.std_error[k] = std::sqrt(var / m);
    }
  }
  return e;
}

}  // namespace qnoise
