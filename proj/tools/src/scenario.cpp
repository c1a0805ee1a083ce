#include "scenario.hpp"

#include <qnoise/qnoise.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <thread>

namespace qlab {

using namespace qnoise;
using nlohmann::json;

namespace {

const std::vector<std::string> kKinds = {"standard", "qnd", "cqnc", "parametric", "oracle"};

const std::map<std::string, std::vector<std::string>> kQuantities = {
    {"standard", {"detected", "optimal_total", "force_noise_vs_coupling"}},
    {"qnd", {"n_add", "output_phase", "n_add_vs_pump", "n_add_min_vs_omega_sw"}},
    {"cqnc", {"force_noise", "force_noise_vs_power"}},
    {"parametric", {"n_add", "R_m", "n_add_and_R_m"}},
    {"oracle", {"psd"}},
};

const std::map<std::string, std::vector<std::string>> kParams = {
    {"standard",
     {"omega_m", "gamma_m", "kappa", "g", "g0", "Delta", "mass", "temperature", "cavity_length",
      "omega_c", "lambda_L", "Gamma_L", "omega_N", "gamma_tilde", "thermal", "S_ff"}},
    {"qnd",
     {"omega_R", "omega_sw", "omega_m", "G0", "G", "n_atoms", "g_a", "Delta_a", "kappa", "gamma",
      "gamma_over_kappa", "eta_max", "eta_over_eta_opt", "n_th_b", "leakage", "exact_mean_field"}},
    {"cqnc",
     {"omega_m", "gamma_m", "kappa", "g", "G", "G_over_g", "Gamma", "g0", "lambda_L", "P_L",
      "kappa_in", "Delta_c", "Delta_c_over_kappa", "temperature", "n_d", "mass", "squeeze_N",
      "squeeze_phi", "atoms", "route", "drop_gamma_sq", "thermal", "at_omega", "at_omega_offset"}},
    {"parametric",
     {"omega_m", "gamma_m", "gamma_d", "kappa", "C0", "C1", "xi_m", "xi_d", "n_c", "n_m", "n_d",
      "mass", "n_atoms", "g_a", "g0", "omega_R", "omega_c", "omega_a", "cavity_length"}},
};

const std::vector<std::string> kOracleParams = {
    "system", "trajectories", "duration", "dt", "segment_length", "overlap", "stride",
    "seed", "band_max", "compare_points", "threads", "integrator"};

/// Value lookup through an optional curve section, then [params].
class Params {
 public:
  Params(const Config& cfg, const Section* curve) : cfg_(cfg), curve_(curve) {}

  bool has(const std::string& key) const { return entry(key) != nullptr; }

  double num(const std::string& key) const {
    const auto* e = entry(key);
    if (!e) fail(key, "required parameter is missing");
    const auto v = parse_quantity(e->raw);
    if (!v || !std::isfinite(*v)) fail(key, "cannot read '" + e->raw + "' as a number");
    return *v;
  }
  double num_or(const std::string& key, double dflt) const { return has(key) ? num(key) : dflt; }

  std::string str_or(const std::string& key, const std::string& dflt) const {
    const auto* e = entry(key);
    return e ? e->raw : dflt;
  }

  bool flag_or(const std::string& key, bool dflt) const {
    const auto* e = entry(key);
    if (!e) return dflt;
    if (e->raw == "true" || e->raw == "1" || e->raw == "on") return true;
    if (e->raw == "false" || e->raw == "0" || e->raw == "off") return false;
    fail(key, "expected true or false, got '" + e->raw + "'");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const char* sec = curve_ && curve_->find(key) ? curve_->name.c_str() : "params";
    cfg_.fail(sec, key, msg);
  }

 private:
  const Entry* entry(const std::string& key) const {
    if (curve_)
      if (const auto* e = curve_->find(key)) return e;
    if (const auto* s = cfg_.section("params")) return s->find(key);
    return nullptr;
  }

  const Config& cfg_;
  const Section* curve_;
};

ThermalModel thermal_of(const Params& p, ThermalModel dflt) {
  const std::string t = p.str_or("thermal", dflt == ThermalModel::bose ? "bose" : "classical");
  if (t == "bose") return ThermalModel::bose;
  if (t == "classical") return ThermalModel::classical;
  p.fail("thermal", "expected bose or classical");
}

std::string kind_of(const Config& cfg) {
  const std::string k = cfg.text("scenario", "kind");
  if (std::find(kKinds.begin(), kKinds.end(), k) == kKinds.end())
    cfg.fail("scenario", "kind", "unknown kind '" + k + "'");
  return k;
}

std::string quantity_of(const Config& cfg, const std::string& kind) {
  const auto& qs = kQuantities.at(kind);
  const std::string q = cfg.text_or("scenario", "quantity", qs.front());
  if (std::find(qs.begin(), qs.end(), q) == qs.end())
    cfg.fail("scenario", "quantity", "quantity '" + q + "' is not available for kind " + kind);
  return q;
}

// ---- parameter resolution ------------------------------------------------

struct StandardSetup {
  StandardOmsParams p;
  LpnParams lpn;
  ThermalModel thermal;
  double S_ff = 0;
};

StandardSetup standard_setup(const Params& q) {
  StandardSetup s;
  s.p.omega_m = q.num("omega_m");
  s.p.gamma_m = q.num("gamma_m");
  s.p.kappa = q.num("kappa");
  s.p.Delta = q.num_or("Delta", 0.0);
  s.p.mass = q.num_or("mass", 0.0);
  s.p.temperature = q.num_or("temperature", 0.0);
  s.p.cavity_length = q.num_or("cavity_length", 0.0);
  if (q.has("g0")) {
    s.p.g0 = q.num("g0");
  } else if (s.p.cavity_length > 0 && s.p.mass > 0 && (q.has("omega_c") || q.has("lambda_L"))) {
    const double wc = q.has("omega_c") ? q.num("omega_c")
                                       : constants::two_pi * constants::c_light / q.num("lambda_L");
    s.p.g0 = g0_from_geometry(wc, s.p.cavity_length, s.p.mass, s.p.omega_m);
  }
  s.p.g = q.num_or("g", 0.0);
  s.lpn.Gamma_L = q.num_or("Gamma_L", 0.0);
  s.lpn.omega_N = q.num_or("omega_N", 0.0);
  s.lpn.gamma_tilde = q.num_or("gamma_tilde", s.lpn.omega_N / 2.0);
  s.thermal = thermal_of(q, ThermalModel::classical);
  s.S_ff = q.num_or("S_ff", 0.0);
  s.p.validate();
  s.lpn.validate();
  return s;
}

struct QndSetup {
  QndDrive drive;
  double G = 0;
  QndOptions opt;
  json derived = json::object();
};

QndSetup qnd_setup(const Params& q, std::optional<double> eta_override = std::nullopt) {
  QndSetup s;
  const double kappa = q.num("kappa");
  const double gamma = q.has("gamma") ? q.num("gamma") : q.num("gamma_over_kappa") * kappa;
  double omega_m = 0, G = 0;
  double G0 = q.has("G0") ? q.num("G0") : 0.0;
  if (!q.has("G0") && q.has("n_atoms"))
    G0 = qnd_coupling_from_atoms(q.num("n_atoms"), q.num("g_a"), q.num("Delta_a"));
  if (q.has("omega_sw")) {
    const auto b = bogoliubov_derive(q.num("omega_R"), q.num("omega_sw"), G0);
    omega_m = b.omega_m;
    G = b.G;
    s.derived["omega_d"] = b.omega_d;
    s.derived["chi_factor"] = b.chi_factor;
  } else {
    omega_m = q.num("omega_m");
    G = q.has("G") ? q.num("G") : G0;
  }
  s.derived["G0"] = G0;
  s.derived["G"] = G;
  s.derived["omega_m"] = omega_m;
  if (!(G > 0)) q.fail("G", "coupling resolves to zero; set G, G0 or the atomic parameters");
  const double eta_opt = optimal_pump(omega_m, kappa, gamma, G);
  double eta = eta_opt * q.num_or("eta_over_eta_opt", 1.0);
  if (q.has("eta_max")) eta = q.num("eta_max");
  if (eta_override) eta = *eta_override;
  s.drive = QndDrive::from_pump(omega_m, kappa, gamma, eta, q.num_or("n_th_b", 0.0));
  s.G = G;
  s.opt.include_mean_field_leakage = q.flag_or("leakage", true);
  s.opt.exact_mean_field = q.flag_or("exact_mean_field", true);
  s.derived["eta_max"] = eta;
  s.derived["eta_opt"] = eta_opt;
  s.derived["n_add_min_closed_form"] = n_add_min(omega_m, kappa);
  return s;
}

struct CqncSetup {
  CqncParams p;
  SqueezedInput sq;
  ThermalModel thermal;
  bool atoms = true;
  std::string route;
  json derived = json::object();
};

CqncSetup cqnc_setup(const Params& q, std::optional<double> g_override = std::nullopt) {
  CqncSetup s;
  auto& p = s.p;
  p.omega_m = q.num("omega_m");
  p.gamma_m = q.num("gamma_m");
  p.kappa = q.num("kappa");
  p.Delta_c = q.has("Delta_c_over_kappa") ? q.num("Delta_c_over_kappa") * p.kappa : q.num_or("Delta_c", 0.0);
  p.Gamma = q.num_or("Gamma", p.gamma_m);
  p.temperature = q.num_or("temperature", 0.0);
  p.n_d = q.num_or("n_d", 0.0);
  p.mass = q.num_or("mass", 0.0);
  p.g0 = q.num_or("g0", 0.0);
  p.lambda_L = q.num_or("lambda_L", 0.0);
  p.kappa_in = q.num_or("kappa_in", 0.0);
  p.drop_gamma_sq = q.flag_or("drop_gamma_sq", true);
  s.atoms = q.flag_or("atoms", true);
  s.thermal = thermal_of(q, ThermalModel::classical);
  s.route = q.str_or("route", "closed");
  if (s.route != "closed" && s.route != "exact" && s.route != "lti")
    q.fail("route", "expected closed, exact or lti");
  const double ratio = q.num_or("G_over_g", 1.0);
  if (g_override) {
    p.g = *g_override;
  } else if (q.has("g")) {
    p.g = q.num("g");
  } else {
    p.P_L = q.num("P_L");
    // Delta_c is the effective detuning, so the atomic frequency pull is not added again.
    p.G = 0;
    p.g = power_to_coupling(p.P_L, p).g;
    s.derived["alpha_abs"] = p.g / (2.0 * p.g0);
  }
  p.G = s.atoms ? (q.has("G") ? q.num("G") : ratio * p.g) : 0.0;
  s.derived["g"] = p.g;
  s.derived["G"] = p.G;
  const double N = q.num_or("squeeze_N", 0.0);
  const double phi = q.num_or("squeeze_phi", phi_opt(p.Delta_c / p.kappa));
  s.sq = SqueezedInput::pure(N, phi);
  p.validate();
  return s;
}

double cqnc_value(double omega, const CqncSetup& s) {
  if (!s.atoms) return standard_force_noise_squeezed(omega, s.p, s.sq, s.thermal);
  if (s.route == "exact") return force_noise_exact(omega, s.p, s.sq, s.thermal);
  if (s.route == "lti") return force_noise_lti(omega, s.p, s.sq, s.thermal);
  if (s.p.perfectly_matched()) return force_noise_spectrum_perfect(omega, s.p, s.sq, s.thermal);
  return force_noise_spectrum_mismatch(omega, s.p, s.sq, s.thermal);
}

struct ParametricSetup {
  HybridParams p;
  json derived = json::object();
};

ParametricSetup parametric_setup(const Params& q) {
  ParametricSetup s;
  const double C0 = q.num("C0");
  const double C1 = q.num_or("C1", 0.0);
  const double xi_d = q.num_or("xi_d", 0.0);
  const double xi_m = q.has("xi_m") ? q.num("xi_m") : impedance_match(C0, C1, xi_d);
  s.p = HybridParams::from_cooperativities(C0, C1, xi_m, xi_d, q.num("kappa"), q.num("gamma_m"),
                                           q.num_or("gamma_d", q.num("gamma_m")), q.num_or("omega_m", 0.0),
                                           q.num_or("mass", 0.0));
  s.p.n_c = q.num_or("n_c", 0.0);
  s.p.n_m = q.num_or("n_m", 0.0);
  s.p.n_d = q.num_or("n_d", 0.0);
  s.derived["C0"] = C0;
  s.derived["C1"] = C1;
  s.derived["xi_m"] = xi_m;
  s.derived["xi_d"] = xi_d;
  s.derived["g"] = s.p.g;
  s.derived["G"] = s.p.G;
  const auto rep = stability_check(build_drift(s.p).drift);
  s.derived["stable"] = rep.stable;
  s.derived["max_real_part"] = rep.max_real_part;
  if (C0 > 0 && xi_d != 1.0) s.derived["sqrt_G_a"] = optical_gain_root(C0, C1, xi_m, xi_d);
  return s;
}

// ---- grids -------------------------------------------------------------

std::vector<double> axis_values(const Config& cfg, const Params& base) {
  cfg.require_keys("grid", {"min", "max", "points", "scale", "spacing"});
  const double lo = cfg.number("grid", "min");
  const double hi = cfg.number("grid", "max");
  const double pts = cfg.number("grid", "points");
  if (!(pts >= 2) || pts != std::floor(pts) || pts > 1e7) cfg.fail("grid", "points", "need an integer >= 2");
  if (!(hi > lo)) cfg.fail("grid", "max", "max must exceed min");
  const std::string scale = cfg.text_or("grid", "scale", "1");
  double f = 1.0;
  if (scale != "1") {
    if (auto v = parse_quantity(scale)) {
      f = *v;
    } else {
      f = base.num(scale);
    }
  }
  const std::string spacing = cfg.text_or("grid", "spacing", "linear");
  const auto n = static_cast<std::size_t>(pts);
  std::vector<double> out;
  if (spacing == "linear") {
    out = linspace(lo * f, hi * f, n);
  } else if (spacing == "log") {
    if (!(lo > 0)) cfg.fail("grid", "min", "log spacing needs min > 0");
    for (double x : linspace(std::log(lo), std::log(hi), n)) out.push_back(std::exp(x) * f);
  } else {
    cfg.fail("grid", "spacing", "expected linear or log");
  }
  return out;
}

struct Curve {
  std::string name;
  const Section* section;
};

std::vector<Curve> curves_of(const Config& cfg) {
  std::vector<Curve> out;
  for (const auto* s : cfg.sections_with_prefix("curve.")) out.push_back({s->name.substr(6), s});
  if (out.empty()) out.push_back({"", nullptr});
  return out;
}

std::string col(const std::string& base, const std::string& curve) {
  return curve.empty() ? base : base + "_" + curve;
}

/// Parallel map over indices with ordered results.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, unsigned threads, F&& f) {
  std::vector<T> out(n);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nt = static_cast<unsigned>(std::min<std::size_t>(threads ? threads : hw, n));
  std::vector<std::exception_ptr> err(std::max(1u, nt));
  auto body = [&](unsigned t) {
    try {
      for (std::size_t i = t; i < n; i += nt) out[i] = f(i);
    } catch (...) {
      err[t] = std::current_exception();
    }
  };
  if (nt <= 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(body, t);
    for (auto& th : pool) th.join();
  }
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
  return out;
}

// ---- per-kind runners ----------------------------------------------------

RunResult run_standard(const Config& cfg, const std::string& quantity) {
  RunResult r;
  const auto curves = curves_of(cfg);
  const Params base(cfg, nullptr);
  const auto xs = axis_values(cfg, base);
  std::vector<std::vector<double>> cols;
  std::vector<std::string> names;
  double omega_m_ref = 0;
  for (const auto& c : curves) {
    const Params q(cfg, c.section);
    auto s = standard_setup(q);
    omega_m_ref = s.p.omega_m;
    json d;
    d["g0"] = s.p.g0;
    if (quantity == "detected") {
      std::vector<double> v;
      DetectedOptions o{s.thermal, s.S_ff};
      for (double w : xs) v.push_back(detected_spectrum_value(w, s.p, s.lpn, o) / s.p.gamma_m);
      cols.push_back(v);
      names.push_back(col("value", c.name));
      d["C_eff_0"] = std::abs(effective_cooperativity(0.0, s.p));
    } else if (quantity == "optimal_total") {
      std::vector<double> v, sq;
      for (double w : xs) {
        v.push_back(optimal_total_noise(w, s.p, s.lpn, s.thermal) / s.p.gamma_m);
        sq.push_back(sql(w, s.p) / s.p.gamma_m);
      }
      cols.push_back(v);
      names.push_back(col("value", c.name));
      cols.push_back(sq);
      names.push_back(col("sql", c.name));
    } else {
      // x axis is g / g_opt at the mechanical resonance, zero temperature
      const double gopt = std::sqrt(optimal_coupling_sq(s.p.omega_m, s.p));
      std::vector<double> v, shot, ba;
      for (double x : xs) {
        s.p.g = x * gopt;
        v.push_back(standard_force_noise(s.p.omega_m, s.p, s.thermal));
        shot.push_back(0.5 / (x * x));
        ba.push_back(0.5 * x * x);
      }
      cols.push_back(v);
      names.push_back(col("value", c.name));
      cols.push_back(shot);
      names.push_back(col("shot_noise", c.name));
      cols.push_back(ba);
      names.push_back(col("back_action", c.name));
      d["g_opt"] = gopt;
    }
    r.derived[c.name.empty() ? "params" : c.name] = d;
  }
  if (quantity == "force_noise_vs_coupling") {
    r.table.header = {"g_over_g_opt"};
    for (std::size_t i = 0; i < xs.size(); ++i) r.table.rows.push_back({xs[i]});
  } else {
    r.table.header = {"omega_rad_s", "omega_over_omega_m"};
    for (double w : xs) r.table.rows.push_back({w, w / omega_m_ref});
  }
  for (std::size_t k = 0; k < cols.size(); ++k) {
    r.table.header.push_back(names[k]);
    for (std::size_t i = 0; i < xs.size(); ++i) r.table.rows[i].push_back(cols[k][i]);
  }
  return r;
}

RunResult run_qnd(const Config& cfg, const std::string& quantity, unsigned threads) {
  RunResult r;
  const auto curves = curves_of(cfg);
  const Params base(cfg, nullptr);
  const auto xs = axis_values(cfg, base);
  std::vector<std::vector<double>> cols;
  double omega_m_ref = 0;
  for (const auto& c : curves) {
    const Params q(cfg, c.section);
    std::vector<double> v;
    if (quantity == "n_add_vs_pump") {
      auto s0 = qnd_setup(q);
      const double kappa = s0.drive.kappa;
      v = parallel_map<double>(xs.size(), threads, [&](std::size_t i) {
        auto s = qnd_setup(q, xs[i] * kappa);
        return n_add(0.0, s.drive, s.G, s.opt);
      });
      const auto best = minimize_n_add_over_pump(s0.drive.omega_m, kappa, s0.drive.gamma, s0.G, s0.opt);
      s0.derived["eta_numeric_min"] = best.first;
      s0.derived["n_add_numeric_min"] = best.second;
      r.derived[c.name.empty() ? "params" : c.name] = s0.derived;
    } else if (quantity == "n_add_min_vs_omega_sw") {
      const double kappa = q.num("kappa");
      const double wR = q.num("omega_R");
      for (double wsw : xs) v.push_back(n_add_min(bogoliubov_derive(wR, wsw, 0.0).omega_m, kappa));
      r.derived[c.name.empty() ? "params" : c.name] = json{{"kappa", kappa}};
    } else {
      auto s = qnd_setup(q);
      omega_m_ref = s.drive.omega_m;
      v = parallel_map<double>(xs.size(), threads, [&](std::size_t i) {
        return quantity == "n_add" ? n_add(xs[i], s.drive, s.G, s.opt)
                                   : output_phase_spectrum_value(xs[i], s.drive, s.G, s.opt);
      });
      r.derived[c.name.empty() ? "params" : c.name] = s.derived;
    }
    cols.push_back(v);
    r.table.header.push_back(col("value", c.name));
  }
  std::vector<std::string> lead;
  if (quantity == "n_add_vs_pump") lead = {"eta_max_over_kappa"};
  else if (quantity == "n_add_min_vs_omega_sw") lead = {"omega_sw_rad_s"};
  else lead = {"omega_rad_s", "omega_over_omega_m"};
  r.table.header.insert(r.table.header.begin(), lead.begin(), lead.end());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<double> row{xs[i]};
    if (lead.size() == 2) row.push_back(xs[i] / omega_m_ref);
    for (const auto& cv : cols) row.push_back(cv[i]);
    r.table.rows.push_back(row);
  }
  return r;
}

RunResult run_cqnc(const Config& cfg, const std::string& quantity, unsigned threads) {
  RunResult r;
  const auto curves = curves_of(cfg);
  const Params base(cfg, nullptr);
  const auto xs = axis_values(cfg, base);
  std::vector<std::vector<double>> cols;
  double omega_m_ref = base.num("omega_m");
  for (const auto& c : curves) {
    const Params q(cfg, c.section);
    std::vector<double> v;
    if (quantity == "force_noise") {
      auto s = cqnc_setup(q);
      v = parallel_map<double>(xs.size(), threads, [&](std::size_t i) { return cqnc_value(xs[i], s); });
      r.derived[c.name.empty() ? "params" : c.name] = s.derived;
    } else {
      // x axis is (g/g0)^2 at a fixed frequency
      const double g0 = q.num("g0");
      const double w = q.num_or("at_omega", q.num("omega_m")) + q.num_or("at_omega_offset", 0.0);
      v = parallel_map<double>(xs.size(), threads, [&](std::size_t i) {
        auto s = cqnc_setup(q, g0 * std::sqrt(xs[i]));
        return cqnc_value(w, s);
      });
      r.derived[c.name.empty() ? "params" : c.name] = json{{"omega", w}};
    }
    cols.push_back(v);
    r.table.header.push_back(col("value", c.name));
  }
  const bool vs_power = quantity == "force_noise_vs_power";
  const std::vector<std::string> lead = vs_power ? std::vector<std::string>{"g_over_g0_sq"}
                                                 : std::vector<std::string>{"omega_rad_s", "omega_over_omega_m"};
  r.table.header.insert(r.table.header.begin(), lead.begin(), lead.end());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<double> row{xs[i]};
    if (!vs_power) row.push_back(xs[i] / omega_m_ref);
    for (const auto& cv : cols) row.push_back(cv[i]);
    r.table.rows.push_back(row);
  }
  return r;
}

RunResult run_parametric(const Config& cfg, const std::string& quantity) {
  RunResult r;
  const auto curves = curves_of(cfg);
  const Params base(cfg, nullptr);
  const auto xs = axis_values(cfg, base);
  const double omega_m_ref = base.num_or("omega_m", 0.0);
  const double gamma_ref = base.num("gamma_m");
  r.table.header = {"omega_rad_s", "omega_over_omega_m", "omega_over_gamma_m"};
  std::vector<std::vector<double>> cols;
  ParametricOptions opt;
  opt.require_stable = false;  // stability is reported in the manifest, spectra are still defined
  for (const auto& c : curves) {
    const Params q(cfg, c.section);
    auto s = parametric_setup(q);
    if (!s.derived["stable"].get<bool>())
      r.warnings.push_back("curve '" + c.name + "' has an unstable drift matrix");
    std::vector<double> na, rm;
    for (double w : xs) {
      const auto x = response_and_noise(w, s.p, opt);
      na.push_back(x.n_add);
      rm.push_back(x.R_m);
    }
    const auto r0 = response_and_noise(0.0, s.p, opt);
    s.derived["n_add_0"] = r0.n_add;
    s.derived["R_m_0"] = r0.R_m;
    if (quantity != "R_m") {
      cols.push_back(na);
      r.table.header.push_back(col("n_add", c.name));
    }
    if (quantity != "n_add") {
      cols.push_back(rm);
      r.table.header.push_back(col("R_m", c.name));
    }
    r.derived[c.name.empty() ? "params" : c.name] = s.derived;
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<double> row{xs[i], omega_m_ref > 0 ? xs[i] / omega_m_ref : 0.0, xs[i] / gamma_ref};
    for (const auto& cv : cols) row.push_back(cv[i]);
    r.table.rows.push_back(row);
  }
  return r;
}

RunResult run_oracle(const Config& cfg, unsigned threads) {
  cfg.require_keys("oracle", kOracleParams);
  const std::string system = cfg.text("oracle", "system");
  const Params q(cfg, nullptr);
  SdeRun run;
  std::function<double(double)> analytic;
  RMatrix obs;
  double omega_ref = 1;
  std::string channel;
  if (system == "standard") {
    auto s = standard_setup(q);
    const auto sys = standard_oms_system(s.p, s.lpn, ThermalModel::bose);
    run.system = sys;
    obs = RMatrix::Zero(1, sys.dim());
    obs(0, 1) = 1;
    const auto p = s.p;
    const auto lpn = s.lpn;
    analytic = [p, lpn](double w) {
      const double sy = detected_spectrum_value(w, p, lpn, {}) * detected_to_output_gain(w, p);
      return (sy - 0.5) / p.kappa + p.kappa * std::norm(cplx(chi_cavity(w, p.kappa))) / 2.0;
    };
    omega_ref = s.p.omega_m;
    channel = "Y";
  } else if (system == "parametric") {
    auto s = parametric_setup(q);
    const auto sys = build_drift(s.p);
    run.system = sys;
    obs = RMatrix::Zero(1, 6);
    obs(0, 1) = 1;
    const auto p = s.p;
    analytic = [p](double w) {
      const auto x = susceptibility_elements(w, p);
      const auto rn = response_and_noise(w, p);
      const double sout = rn.R_m * ((p.n_m + 0.5) + rn.n_add);
      return (sout - (p.n_c + 0.5) * (1.0 - 2.0 * p.kappa * x.chi22.real())) / p.kappa;
    };
    omega_ref = s.p.omega_m > 0 ? s.p.omega_m : 1.0;
    channel = "P_a";
  } else if (system == "qnd") {
    auto s = qnd_setup(q);
    run.system = qnd_periodic_system(s.drive, s.G);
    obs = RMatrix::Zero(1, 4);
    obs(0, 1) = 1;
    QndOptions o = s.opt;
    o.include_mean_field_leakage = false;
    const auto d = s.drive;
    const double G = s.G;
    analytic = [d, G, o](double w) { return intracavity_phase_spectrum(w, d, G, o); };
    omega_ref = s.drive.omega_m;
    channel = "Y";
  } else {
    cfg.fail("oracle", "system", "expected standard, parametric or qnd");
  }
  run.observe = obs;
  run.n_trajectories = static_cast<std::size_t>(cfg.number_or("oracle", "trajectories", 200));
  run.duration = cfg.number("oracle", "duration");
  run.seed = static_cast<std::uint64_t>(cfg.number_or("oracle", "seed", 1));
  run.psd_window.segment_length = static_cast<std::size_t>(cfg.number_or("oracle", "segment_length", 2048));
  run.psd_window.overlap = cfg.number_or("oracle", "overlap", 0.5);
  run.sample_stride = static_cast<std::size_t>(cfg.number_or("oracle", "stride", 4));
  run.threads = static_cast<unsigned>(cfg.number_or("oracle", "threads", threads));
  const std::string integ = cfg.text_or("oracle", "integrator", "exact");
  if (integ == "euler") run.integrator = Integrator::euler_maruyama;
  else if (integ != "exact") cfg.fail("oracle", "integrator", "expected exact or euler");
  // default step: the largest the timescale rule allows
  double rate = 0;
  if (const auto* ls = std::get_if<LinearSystem>(&run.system)) {
    rate = ls->drift.cwiseAbs().maxCoeff();
  } else {
    const auto& ps = std::get<PeriodicSystem>(run.system);
    rate = std::max((ps.A0.cwiseAbs() + ps.Acos.cwiseAbs() + ps.Asin.cwiseAbs()).maxCoeff(), ps.modulation_omega);
  }
  run.dt = cfg.number_or("oracle", "dt", 0.05 / rate);
  const auto est = simulate_psd(run, {0}).front();
  const double band = cfg.number_or("oracle", "band_max", est.omegas.back());
  const auto cmp = compare_psd(est, analytic, 0.0, band,
                               static_cast<std::size_t>(cfg.number_or("oracle", "compare_points", 60)));
  RunResult r;
  r.table.header = {"omega_rad_s", "omega_over_omega_m", "mc", "std_error", "analytic", "sigma"};
  for (std::size_t k = 0; k < est.omegas.size() && est.omegas[k] <= band; ++k) {
    const double a = analytic(est.omegas[k]);
    const double se = est.std_error[k];
    r.table.rows.push_back({est.omegas[k], est.omegas[k] / omega_ref, est.mean[k], se, a,
                            se > 0 ? std::abs(est.mean[k] - a) / se : 0.0});
  }
  r.derived["channel"] = channel;
  r.derived["system"] = system;
  r.derived["dt"] = effective_dt(run);
  r.derived["relaxation_time"] = relaxation_time(run);
  r.derived["segments"] = est.segments;
  r.derived["trajectories"] = est.trajectories;
  r.derived["points_compared"] = cmp.points;
  r.derived["points_within_3_sigma"] = cmp.within;
  r.derived["fraction_within_3_sigma"] = cmp.fraction();
  r.derived["max_sigma"] = cmp.max_sigma;
  return r;
}

}  // namespace

Config with_overrides(const Config& cfg, const RunOptions& opt) {
  Config c = cfg;
  auto fmt = [](double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  if (opt.omega_min) c.set("grid", "min", fmt(*opt.omega_min));
  if (opt.omega_max) c.set("grid", "max", fmt(*opt.omega_max));
  if (opt.omega_points) c.set("grid", "points", std::to_string(*opt.omega_points));
  if ((opt.omega_min || opt.omega_max) && c.has("grid", "scale")) c.set("grid", "scale", "1");
  if (opt.seed) c.set("oracle", "seed", std::to_string(*opt.seed));
  return c;
}

void validate_scenario(const Config& cfg) {
  cfg.require_keys("scenario", {"kind", "quantity", "name", "description"});
  const std::string kind = kind_of(cfg);
  quantity_of(cfg, kind);
  for (const auto& s : cfg.sections()) {
    const bool known = s.name == "scenario" || s.name == "params" || s.name == "grid" ||
                       s.name == "sweep" || s.name == "output" || s.name == "oracle" ||
                       s.name.rfind("curve.", 0) == 0;
    if (!known) cfg.fail_at(s.line, "unknown section [" + s.name + "]");
  }
  cfg.require_keys("output", {"csv", "manifest", "format"});
  cfg.require_keys("sweep", {"param", "values"});
  std::vector<std::string> params;
  if (kind == "oracle") {
    if (!cfg.section("oracle")) cfg.fail_at(0, "oracle scenarios need an [oracle] section");
    cfg.require_keys("oracle", kOracleParams);
    for (const auto& [k, v] : kParams) params.insert(params.end(), v.begin(), v.end());
  } else {
    params = kParams.at(kind);
    if (cfg.section("oracle")) cfg.fail_at(cfg.section("oracle")->line, "[oracle] is only valid for kind = oracle");
  }
  params.push_back("label");
  cfg.require_keys("params", params);
  for (const auto* s : cfg.sections_with_prefix("curve.")) cfg.require_keys(s->name, params);
  if (kind != "oracle" && !cfg.section("grid")) cfg.fail_at(0, "missing section [grid]");
  // every value must at least parse
  for (const auto& s : cfg.sections()) {
    if (s.name != "params" && s.name.rfind("curve.", 0) != 0) continue;
    for (const auto& e : s.entries) {
      static const std::vector<std::string> textual = {"thermal", "leakage", "exact_mean_field",
                                                       "atoms", "route", "drop_gamma_sq", "label"};
      if (std::find(textual.begin(), textual.end(), e.key) != textual.end()) continue;
      if (!parse_quantity(e.raw)) cfg.fail_at(e.line, "cannot read '" + e.raw + "' as a number for '" + e.key + "'");
    }
  }
}

RunResult run_scenario(const Config& in, const RunOptions& opt) {
  const Config cfg = with_overrides(in, opt);
  validate_scenario(cfg);
  const std::string kind = kind_of(cfg);
  const std::string quantity = quantity_of(cfg, kind);
  RunResult r;
  if (kind == "standard") r = run_standard(cfg, quantity);
  else if (kind == "qnd") r = run_qnd(cfg, quantity, opt.threads);
  else if (kind == "cqnc") r = run_cqnc(cfg, quantity, opt.threads);
  else if (kind == "parametric") r = run_parametric(cfg, quantity);
  else r = run_oracle(cfg, opt.threads);
  r.derived["kind"] = kind;
  r.derived["quantity"] = quantity;
  return r;
}

RunResult sweep_scenario(const Config& in, const std::string& param, const std::vector<double>& values,
                         const RunOptions& opt) {
  Config cfg = with_overrides(in, opt);
  validate_scenario(cfg);
  const std::string kind = kind_of(cfg);
  std::vector<std::string> allowed;
  if (kind == "oracle") {
    for (const auto& [k, v] : kParams) allowed.insert(allowed.end(), v.begin(), v.end());
  } else {
    allowed = kParams.at(kind);
  }
  if (std::find(allowed.begin(), allowed.end(), param) == allowed.end())
    cfg.fail("sweep", "param", "unknown parameter '" + param + "' for kind " + kind);
  if (values.empty()) cfg.fail("sweep", "values", "no values");
  auto results = parallel_map<RunResult>(values.size(), opt.threads, [&](std::size_t i) {
    Config c = cfg;
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, values[i]);
    c.set("params", param, std::string(buf, res.ptr));
    // curve sections shadow [params]; the swept value must win
    for (const auto* s : cfg.sections_with_prefix("curve."))
      if (s->find(param)) c.set(s->name, param, std::string(buf, res.ptr));
    RunOptions o = opt;
    o.threads = 1;
    o.omega_min.reset();
    o.omega_max.reset();
    o.omega_points.reset();
    return run_scenario(c, o);
  });
  RunResult out;
  out.table.header = {param};
  out.table.header.insert(out.table.header.end(), results.front().table.header.begin(),
                          results.front().table.header.end());
  json per = json::array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (const auto& row : results[i].table.rows) {
      std::vector<double> r{values[i]};
      r.insert(r.end(), row.begin(), row.end());
      out.table.rows.push_back(std::move(r));
    }
    per.push_back(json{{"value", values[i]}, {"derived", results[i].derived}});
    for (const auto& w : results[i].warnings) out.warnings.push_back(param + "=" + std::to_string(values[i]) + ": " + w);
  }
  out.derived["sweep_param"] = param;
  out.derived["points"] = per;
  return out;
}

std::vector<StabilityResult> check_stability(const Config& cfg) {
  validate_scenario(cfg);
  const std::string kind = kind_of(cfg);
  std::vector<StabilityResult> out;
  auto from_report = [](const StabilityReport& rep, const std::string& name) {
    StabilityResult s;
    s.stable = rep.stable;
    s.max_real_part = rep.max_real_part;
    s.system = name;
    for (auto e : rep.eigenvalues) s.eigenvalues.emplace_back(e.real(), e.imag());
    return s;
  };
  std::string sys_kind = kind;
  if (kind == "oracle") sys_kind = cfg.text("oracle", "system");
  for (const auto& c : curves_of(cfg)) {
    const Params q(cfg, c.section);
    const std::string name = c.name.empty() ? sys_kind : c.name;
    if (sys_kind == "standard") {
      auto s = standard_setup(q);
      out.push_back(from_report(stability_check(standard_oms_system(s.p, s.lpn).drift), name));
    } else if (sys_kind == "cqnc") {
      auto s = cqnc_setup(q);
      out.push_back(from_report(stability_check(cqnc_system(s.p, s.sq).drift), name));
    } else if (sys_kind == "parametric") {
      auto s = parametric_setup(q);
      out.push_back(from_report(stability_check(build_drift(s.p).drift), name));
    } else if (sys_kind == "qnd") {
      auto s = qnd_setup(q);
      const auto mu = floquet_multipliers(qnd_periodic_system(s.drive, s.G));
      StabilityResult r;
      r.system = name + " (Floquet multipliers)";
      double m = 0;
      for (auto v : mu) {
        m = std::max(m, std::abs(v));
        r.eigenvalues.emplace_back(v.real(), v.imag());
      }
      r.stable = m < 1.0;
      r.max_real_part = m;  // largest multiplier modulus for the periodic case
      out.push_back(r);
    } else {
      cfg.fail("scenario", "kind", "no stability check for this kind");
    }
  }
  return out;
}

json derive_experiment(const Config& cfg) {
  validate_scenario(cfg);
  if (kind_of(cfg) != "parametric") cfg.fail("scenario", "kind", "derive-experiment needs kind = parametric");
  const Params q(cfg, nullptr);
  ExperimentInputs in;
  in.C0 = q.num("C0");
  in.C1 = q.num("C1");
  in.n_atoms = q.num("n_atoms");
  in.g_a = q.num("g_a");
  in.omega_R = q.num("omega_R");
  in.gamma_m = q.num("gamma_m");
  in.gamma_d = q.num_or("gamma_d", in.gamma_m);
  in.omega_m = q.num("omega_m");
  in.kappa = q.num("kappa");
  in.omega_c = q.num("omega_c");
  in.omega_a = q.num("omega_a");
  in.g0 = q.has("g0") ? q.num("g0") : g0_from_zpf(in.omega_c, q.num("cavity_length"), q.num("mass"), in.omega_m);
  const auto d = experiment_derive(in);
  json j;
  j["g0"] = in.g0;
  j["omega_sw"] = d.omega_sw;
  j["omega_d"] = d.omega_d;
  j["omega_sw_over_omega_R"] = d.omega_sw / in.omega_R;
  j["omega_d_over_omega_R"] = d.omega_d / in.omega_R;
  j["Delta_a"] = d.Delta_a;
  j["omega_L"] = d.omega_L;
  j["Delta0"] = d.Delta0;
  j["G0"] = d.G0;
  j["n_cav"] = d.n_cav;
  j["E_L"] = std::isfinite(d.E_L) ? json(d.E_L) : json(nullptr);
  j["consistent"] = d.consistent;
  if (!d.consistent) j["issue"] = d.issue;
  return j;
}

}  // namespace qlab
