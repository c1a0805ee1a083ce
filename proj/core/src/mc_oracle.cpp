#include "qnoise/mc_oracle.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "qnoise/errors.hpp"

namespace qnoise {

namespace {

struct Dynamics {
  const LinearSystem* lti = nullptr;
  const PeriodicSystem* periodic = nullptr;

  const RMatrix& noise_in() const { return lti ? lti->noise_in : periodic->noise_in; }
  const CMatrix& corr() const { return lti ? lti->corr : periodic->corr; }
  Eigen::Index dim() const { return lti ? lti->drift.rows() : periodic->A0.rows(); }
};

Dynamics dynamics_of(const SdeRun& run) {
  Dynamics d;
  if (const auto* s = std::get_if<LinearSystem>(&run.system)) {
    s->validate();
    d.lti = s;
  } else {
    const auto& p = std::get<PeriodicSystem>(run.system);
    p.validate();
    d.periodic = &p;
  }
  return d;
}

double period_of(const PeriodicSystem& p) { return 2.0 * std::numbers::pi / p.modulation_omega; }

/// Square root factor L with L L^T = S for a symmetric positive semidefinite S.
RMatrix psd_factor(const RMatrix& S) {
  const RMatrix sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<RMatrix> es(sym);
  Eigen::VectorXd ev = es.eigenvalues();
  const double tol = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -tol) throw InputError("mc_oracle: noise covariance is not positive semidefinite");
    ev[i] = std::sqrt(std::max(ev[i], 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal();
}

/// Exact one-step propagator and accumulated noise covariance for a constant drift (Van Loan).
void van_loan(const RMatrix& A, const RMatrix& W, double h, RMatrix& Phi, RMatrix& Q) {
  const Eigen::Index n = A.rows();
  RMatrix M = RMatrix::Zero(2 * n, 2 * n);
  M.topLeftCorner(n, n) = -A * h;
  M.topRightCorner(n, n) = W * h;
  M.bottomRightCorner(n, n) = A.transpose() * h;
  const RMatrix E = M.exp();
  Phi = E.bottomRightCorner(n, n).transpose();
  Q = Phi * E.topRightCorner(n, n);
  Q = 0.5 * (Q + Q.transpose());
}

/// One (Phi, L) pair per phase step; a single pair for a constant drift.
struct StepTable {
  std::vector<RMatrix> Phi;
  std::vector<RMatrix> L;
  std::vector<RMatrix> drift;  // Euler-Maruyama only
  double dt = 0;
};

StepTable build_steps(const SdeRun& run, const Dynamics& d) {
  StepTable t;
  t.dt = effective_dt(run);
  const RMatrix B = d.noise_in();
  const RMatrix W = B * d.corr().real() * B.transpose();
  const Eigen::Index n = d.dim();
  if (run.integrator == Integrator::euler_maruyama) {
    t.L.push_back(psd_factor(W * t.dt));
    if (d.lti) {
      t.drift.push_back(d.lti->drift);
    } else {
      const auto K = static_cast<std::size_t>(std::llround(period_of(*d.periodic) / t.dt));
      for (std::size_t k = 0; k < K; ++k) t.drift.push_back(d.periodic->drift_at(k * t.dt));
    }
    return t;
  }
  if (d.lti) {
    RMatrix Phi, Q;
    van_loan(d.lti->drift, W, t.dt, Phi, Q);
    t.Phi.push_back(Phi);
    t.L.push_back(psd_factor(Q));
    return t;
  }
  const auto K = static_cast<std::size_t>(std::llround(period_of(*d.periodic) / t.dt));
  const int S = std::max(1, run.substeps);
  const double h = t.dt / S;
  for (std::size_t k = 0; k < K; ++k) {
    RMatrix Phi = RMatrix::Identity(n, n);
    RMatrix Q = RMatrix::Zero(n, n);
    for (int s = 0; s < S; ++s) {
      RMatrix P, Qs;
      van_loan(d.periodic->drift_at(k * t.dt + (s + 0.5) * h), W, h, P, Qs);
      Phi = P * Phi;
      Q = P * Q * P.transpose() + Qs;
    }
    t.Phi.push_back(Phi);
    t.L.push_back(psd_factor(Q));
  }
  return t;
}

double max_rate(const Dynamics& d) {
  if (d.lti) return d.lti->drift.cwiseAbs().maxCoeff();
  const auto& p = *d.periodic;
  const double entries = (p.A0.cwiseAbs() + p.Acos.cwiseAbs() + p.Asin.cwiseAbs()).maxCoeff();
  return std::max(entries, p.modulation_omega);
}

struct Prepared {
  Dynamics dyn;
  StepTable steps;
  RMatrix observe;
  std::size_t burn_steps = 0;
  std::size_t samples = 0;
  std::size_t stride = 1;
  double divergence_bound = 0;
};

Prepared prepare(const SdeRun& run) {
  Prepared p;
  p.dyn = dynamics_of(run);
  const Eigen::Index n = p.dyn.dim();
  if (!(run.dt > 0) || !(run.duration > 0)) throw InputError("mc_oracle: dt and duration must be > 0");
  if (run.n_trajectories == 0) throw InputError("mc_oracle: need at least one trajectory");
  if (run.sample_stride == 0) throw InputError("mc_oracle: sample_stride must be >= 1");
  if (run.x0.size() != 0 && run.x0.size() != n) throw InputError("mc_oracle: x0 has wrong dimension");
  const double rate = max_rate(p.dyn);
  if (rate > 0 && run.dt > 0.05 / rate) {
    std::ostringstream os;
    os << "mc_oracle: dt = " << run.dt << " exceeds 0.05 of the shortest timescale (limit "
       << 0.05 / rate << ")";
    throw InputError(os.str());
  }
  const double tau = relaxation_time(run);
  if (run.duration < 50.0 * tau) {
    std::ostringstream os;
    os << "mc_oracle: duration " << run.duration << " is shorter than 50 relaxation times ("
       << 50.0 * tau << ")";
    throw InputError(os.str());
  }
  p.steps = build_steps(run, p.dyn);
  p.observe = run.observe.size() ? run.observe : RMatrix::Identity(n, n);
  if (p.observe.cols() != n) throw InputError("mc_oracle: observation matrix has wrong width");
  const double burn = run.burn_in < 0 ? 10.0 * tau : run.burn_in;
  p.stride = run.sample_stride;
  p.burn_steps = static_cast<std::size_t>(std::ceil(burn / p.steps.dt));
  p.samples = static_cast<std::size_t>(run.duration / (p.steps.dt * p.stride));
  // Stationary variance scale, used to flag blow-ups long before overflow.
  const RMatrix B = p.dyn.noise_in();
  const double w = (B * p.dyn.corr().real() * B.transpose()).cwiseAbs().maxCoeff();
  const double x0n = run.x0.size() ? run.x0.norm() : 0.0;
  p.divergence_bound = 1e6 * (std::sqrt(w * tau) + x0n + 1e-300);
  return p;
}

RMatrix run_trajectory(const SdeRun& run, const Prepared& p, std::size_t index) {
  const Eigen::Index n = p.dyn.dim();
  std::seed_seq seq{static_cast<std::uint32_t>(run.seed & 0xffffffffu),
                    static_cast<std::uint32_t>(run.seed >> 32),
                    static_cast<std::uint32_t>(index & 0xffffffffu),
                    static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::VectorXd x = run.x0.size() ? run.x0 : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z(n), next(n);
  RMatrix out(p.observe.rows(), p.samples);
  const std::size_t phases =
      run.integrator == Integrator::euler_maruyama ? p.steps.drift.size() : p.steps.Phi.size();
  const std::size_t total = p.burn_steps + p.samples * p.stride;
  const RMatrix& L = p.steps.L.front();
  for (std::size_t step = 0; step < total; ++step) {
    const std::size_t k = step % phases;
    for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
    if (run.integrator == Integrator::euler_maruyama) {
      next.noalias() = x + p.steps.dt * (p.steps.drift[k] * x) + L * z;
    } else {
      next.noalias() = p.steps.Phi[k] * x + p.steps.L[k] * z;
    }
    x.swap(next);
    if ((step & 1023) == 0 && !(x.norm() < p.divergence_bound)) {
      std::ostringstream os;
      os << "mc_oracle: trajectory " << index << " diverged at t = " << step * p.steps.dt;
      throw UnstableError(os.str(), {}, std::numeric_limits<double>::quiet_NaN());
    }
    if (step >= p.burn_steps) {
      const std::size_t rel = step - p.burn_steps;
      if (rel % p.stride == p.stride - 1) out.col(static_cast<Eigen::Index>(rel / p.stride)) = p.observe * x;
    }
  }
  return out;
}

/// Calls work(i) for every trajectory index, spread over worker threads.
template <class F>
void for_each_trajectory(const SdeRun& run, F&& work) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nthreads =
      static_cast<unsigned>(std::min<std::size_t>(run.threads ? run.threads : hw, run.n_trajectories));
  std::vector<std::exception_ptr> errors(nthreads);
  auto body = [&](unsigned tid) {
    try {
      for (std::size_t i = tid; i < run.n_trajectories; i += nthreads) work(i);
    } catch (...) {
      errors[tid] = std::current_exception();
    }
  };
  if (nthreads <= 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(body, t);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void check_stable(const SdeRun& run) {
  if (const auto* s = std::get_if<LinearSystem>(&run.system)) {
    require_stable(s->drift, "mc_oracle");
    return;
  }
  const auto mu = floquet_multipliers(std::get<PeriodicSystem>(run.system));
  double m = 0;
  for (auto v : mu) m = std::max(m, std::abs(v));
  if (!(m < 1.0)) throw UnstableError("mc_oracle: Floquet multiplier outside the unit circle", mu, m);
}

}  // namespace

double effective_dt(const SdeRun& run) {
  if (const auto* p = std::get_if<PeriodicSystem>(&run.system)) {
    const double T = period_of(*p);
    const double K = std::ceil(T / run.dt - 1e-9);
    return T / K;
  }
  return run.dt;
}

double relaxation_time(const SdeRun& run) {
  if (const auto* s = std::get_if<LinearSystem>(&run.system)) {
    const auto rep = stability_check(s->drift);
    if (!rep.stable) throw UnstableError("mc_oracle: drift is not stable", rep.eigenvalues, rep.max_real_part);
    return -1.0 / rep.max_real_part;
  }
  const auto& p = std::get<PeriodicSystem>(run.system);
  const auto mu = floquet_multipliers(p);
  double m = 0;
  for (auto v : mu) m = std::max(m, std::abs(v));
  if (!(m < 1.0)) throw UnstableError("mc_oracle: Floquet multiplier outside the unit circle", mu, m);
  return -period_of(p) / std::log(m);
}

Trajectories simulate(const SdeRun& run) {
  check_stable(run);
  const Prepared p = prepare(run);
  Trajectories t;
  t.sample_dt = p.steps.dt * p.stride;
  t.paths.resize(run.n_trajectories);
  for_each_trajectory(run, [&](std::size_t i) { t.paths[i] = run_trajectory(run, p, i); });
  return t;
}

std::vector<PsdEstimate> simulate_psd(const SdeRun& run, const std::vector<std::size_t>& channels) {
  check_stable(run);
  const Prepared p = prepare(run);
  const double sdt = p.steps.dt * p.stride;
  // Per trajectory, per channel single-trajectory estimates; merged in index order below.
  std::vector<std::vector<PsdEstimate>> parts(run.n_trajectories);
  for_each_trajectory(run, [&](std::size_t i) {
    Trajectories one;
    one.sample_dt = sdt;
    one.paths.push_back(run_trajectory(run, p, i));
    for (auto c : channels) parts[i].push_back(estimate_psd(one, c, run.psd_window));
  });
  std::vector<PsdEstimate> out;
  const double n = static_cast<double>(run.n_trajectories);
  for (std::size_t c = 0; c < channels.size(); ++c) {
    PsdEstimate e;
    e.omegas = parts[0][c].omegas;
    e.segments = parts[0][c].segments;
    e.trajectories = run.n_trajectories;
    const std::size_t m = e.omegas.size();
    e.mean.assign(m, 0.0);
    e.std_error.assign(m, 0.0);
    for (std::size_t i = 0; i < run.n_trajectories; ++i)
      for (std::size_t k = 0; k < m; ++k) e.mean[k] += parts[i][c].mean[k];
    for (auto& v : e.mean) v /= n;
    if (run.n_trajectories > 1) {
      for (std::size_t i = 0; i < run.n_trajectories; ++i)
        for (std::size_t k = 0; k < m; ++k) {
          const double d = parts[i][c].mean[k] - e.mean[k];
          e.std_error[k] += d * d;
        }
      for (auto& v : e.std_error) v = std::sqrt(v / (n - 1.0) / n);
    } else {
      e.std_error = parts[0][c].std_error;
    }
    out.push_back(std::move(e));
  }
  return out;
}

CovarianceEstimate stationary_covariance(const Trajectories& t) {
  if (t.paths.empty()) throw InputError("mc_oracle: no trajectories");
  const Eigen::Index c = t.paths.front().rows();
  std::vector<RMatrix> per;
  for (const auto& x : t.paths) per.push_back(x * x.transpose() / static_cast<double>(x.cols()));
  CovarianceEstimate e;
  e.mean = RMatrix::Zero(c, c);
  for (const auto& m : per) e.mean += m;
  const double n = static_cast<double>(per.size());
  e.mean /= n;
  e.std_error = RMatrix::Zero(c, c);
  if (per.size() > 1) {
    for (const auto& m : per) e.std_error.array() += (m - e.mean).array().square();
    e.std_error = (e.std_error.array() / ((n - 1.0) * n)).sqrt().matrix();
  }
  return e;
}

Spectrum PsdEstimate::to_spectrum() const {
  return Spectrum(omegas, mean, Normalization::dimensionless);
}

PsdComparison compare_psd(const PsdEstimate& est, const std::function<double(double)>& analytic,
                          double omega_min, double omega_max, std::size_t n_points, double threshold) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < est.omegas.size(); ++k)
    if (est.omegas[k] >= omega_min && est.omegas[k] <= omega_max) idx.push_back(k);
  if (idx.empty()) throw InputError("compare_psd: no bins in the requested band");
  const std::size_t step = std::max<std::size_t>(1, idx.size() / std::max<std::size_t>(1, n_points));
  PsdComparison c;
  for (std::size_t j = 0; j < idx.size(); j += step) {
    const std::size_t k = idx[j];
    const double se = est.std_error[k];
    const double dev = std::abs(est.mean[k] - analytic(est.omegas[k]));
    const double s = se > 0 ? dev / se : (dev == 0 ? 0.0 : std::numeric_limits<double>::infinity());
    c.omegas.push_back(est.omegas[k]);
    c.sigma.push_back(s);
    ++c.points;
    if (s < threshold) ++c.within;
    c.max_sigma = std::max(c.max_sigma, s);
  }
  return c;
}

}  // namespace qnoise
