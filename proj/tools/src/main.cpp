#include <CLI11.hpp>

#include <qnoise/errors.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "config.hpp"
#include "output.hpp"
#include "scenario.hpp"

namespace {

enum Exit { ok = 0, failure = 1, parse_error = 2, unstable = 3, pole = 4 };

struct Common {
  std::string config;
  std::string out;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<double> omega_min, omega_max;
  std::optional<std::size_t> omega_points;
  unsigned threads = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("config,--config", c.config, "scenario config (.toml) or a run manifest (.json)")->required();
  app->add_option("--out", c.out, "output path; the manifest goes next to it as <out>.manifest.json");
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--seed", c.seed, "RNG seed for oracle runs");
  app->add_option("--omega-min", c.omega_min, "grid minimum, rad/s");
  app->add_option("--omega-max", c.omega_max, "grid maximum, rad/s");
  app->add_option("--omega-points", c.omega_points, "grid size");
  app->add_option("--threads", c.threads, "worker threads (0: all cores)");
}

qlab::Config load_config(const std::string& path) {
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    std::ifstream f(path);
    if (!f) throw qlab::ParseError(path, 0, "cannot open manifest");
    std::stringstream ss;
    ss << f.rdbuf();
    return qlab::Config::parse(qlab::config_text_from_manifest(ss.str()), path);
  }
  return qlab::Config::load(path);
}

qlab::RunOptions options_of(const Common& c) {
  qlab::RunOptions o;
  o.seed = c.seed;
  o.omega_min = c.omega_min;
  o.omega_max = c.omega_max;
  o.omega_points = c.omega_points;
  o.threads = c.threads;
  return o;
}

std::string default_out(const qlab::Config& cfg, const Common& c, const std::string& suffix) {
  if (!c.out.empty()) return c.out;
  if (cfg.has("output", "csv")) return cfg.text("output", "csv");
  return "";
}

int emit(const std::string& command, const qlab::Config& cfg, const Common& c, const qlab::RunResult& r,
         const std::string& started) {
  const std::string format = c.format;
  const std::string body = format == "json" ? qlab::to_json(r.table).dump(2) + "\n" : qlab::to_csv(r.table);
  const std::string out = default_out(cfg, c, format);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  qlab::ManifestInfo m;
  m.command = command;
  m.config_origin = cfg.origin();
  m.config_text = qlab::with_overrides(cfg, options_of(c)).to_text();
  if (cfg.has("oracle", "seed") || c.seed) {
    m.has_seed = true;
    m.seed = c.seed ? *c.seed : static_cast<std::uint64_t>(cfg.number("oracle", "seed"));
  }
  m.started_utc = started;
  m.finished_utc = qlab::utc_now();
  if (out.empty()) {
    std::cout << body;
    return ok;
  }
  m.csv_path = out;
  qlab::write_file(out, body);
  const std::string manifest = cfg.has("output", "manifest") && c.out.empty() ? cfg.text("output", "manifest")
                                                                             : out + ".manifest.json";
  qlab::write_file(manifest, qlab::make_manifest(m, r).dump(2) + "\n");
  std::cerr << "wrote " << out << " and " << manifest << "\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qnoise-lab: quantum noise spectra of linearized optomechanical systems"};
  app.require_subcommand(1);
  Common run_c, sweep_c, stab_c, derive_c;
  std::string sweep_param;
  std::vector<double> sweep_values;

  auto* run = app.add_subcommand("run", "evaluate a scenario and write CSV plus manifest");
  add_common(run, run_c);
  auto* sweep = app.add_subcommand("sweep", "repeat a scenario over values of one parameter");
  add_common(sweep, sweep_c);
  sweep->add_option("--param", sweep_param, "parameter in [params]; defaults to [sweep] param");
  sweep->add_option("--values", sweep_values, "values; defaults to [sweep] values")->delimiter(',');
  auto* stab = app.add_subcommand("check-stability", "eigenvalue report for every curve");
  add_common(stab, stab_c);
  auto* derive = app.add_subcommand("derive-experiment", "experimental parameters for a parametric target");
  add_common(derive, derive_c);

  CLI11_PARSE(app, argc, argv);
  const std::string started = qlab::utc_now();
  try {
    if (*run) {
      const auto cfg = load_config(run_c.config);
      const auto r = qlab::run_scenario(cfg, options_of(run_c));
      return emit("run", cfg, run_c, r, started);
    }
    if (*sweep) {
      const auto cfg = load_config(sweep_c.config);
      std::string param = sweep_param;
      if (param.empty()) param = cfg.text("sweep", "param");
      std::vector<double> values = sweep_values;
      if (values.empty()) values = cfg.numbers("sweep", "values");
      const auto r = qlab::sweep_scenario(cfg, param, values, options_of(sweep_c));
      return emit("sweep", cfg, sweep_c, r, started);
    }
    if (*stab) {
      const auto cfg = load_config(stab_c.config);
      const auto res = qlab::check_stability(cfg);
      nlohmann::json j = nlohmann::json::array();
      bool all = true;
      for (const auto& s : res) {
        nlohmann::json e;
        e["system"] = s.system;
        e["stable"] = s.stable;
        e["max_real_part"] = s.max_real_part;
        nlohmann::json ev = nlohmann::json::array();
        for (auto [re, im] : s.eigenvalues) ev.push_back({re, im});
        e["eigenvalues"] = ev;
        j.push_back(e);
        all = all && s.stable;
      }
      std::cout << j.dump(2) << "\n";
      return all ? ok : unstable;
    }
    if (*derive) {
      const auto cfg = load_config(derive_c.config);
      const auto j = qlab::derive_experiment(cfg);
      std::cout << j.dump(2) << "\n";
      if (!j["consistent"].get<bool>()) {
        std::cerr << "inconsistent target: " << j["issue"].get<std::string>() << "\n";
        return failure;
      }
      return ok;
    }
  } catch (const qlab::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return parse_error;
  } catch (const qnoise::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return parse_error;
  } catch (const qnoise::UnstableError& e) {
    std::cerr << "unstable: " << e.what() << "\n";
    for (auto v : e.eigenvalues()) std::cerr << "  eigenvalue " << v.real() << " " << v.imag() << "i\n";
    return unstable;
  } catch (const qnoise::PoleError& e) {
    std::cerr << "pole on grid at omega = " << e.omega() << ": " << e.what() << "\n";
    return pole;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return failure;
  }
  return failure;
}
