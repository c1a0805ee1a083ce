#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "config.hpp"
#include "output.hpp"
#include "scenario.hpp"

using namespace qlab;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

std::string recipe(const std::string& name) { return std::string(QNOISE_RECIPE_DIR) + "/" + name; }

fs::path scratch_dir() {
  const auto d = fs::temp_directory_path() / ("qnoise_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_lab(const std::string& args) {
  const std::string cmd = std::string(QNOISE_LAB_EXE) + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::size_t column(const Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == name) return i;
  throw std::runtime_error("no column " + name);
}

int parse_error_line(const std::string& text) {
  try {
    const auto cfg = Config::parse(text, "t.toml");
    validate_scenario(cfg);
    run_scenario(cfg);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Quantity, UnitSugar) {
  EXPECT_NEAR(*parse_quantity("2pi*1.3MHz"), kTwoPi * 1.3e6, 1e-6);
  EXPECT_NEAR(*parse_quantity("1.3e6"), 1.3e6, 1e-9);
  EXPECT_NEAR(*parse_quantity("780nm"), 780e-9, 1e-21);
  EXPECT_NEAR(*parse_quantity("10ng"), 10e-12, 1e-24);
  EXPECT_NEAR(*parse_quantity("0.1uK"), 1e-7, 1e-20);
  EXPECT_NEAR(*parse_quantity("24uW"), 24e-6, 1e-18);
  EXPECT_NEAR(*parse_quantity("2pi*30mHz"), kTwoPi * 0.03, 1e-15);
  EXPECT_NEAR(*parse_quantity("2pi*30MHz"), kTwoPi * 3e7, 1e-6);
  EXPECT_NEAR(*parse_quantity("100Hz"), 100.0, 1e-12);
  EXPECT_FALSE(parse_quantity("fast").has_value());
  EXPECT_FALSE(parse_quantity("3 parsecs").has_value());
}

TEST(Config, LocatedErrors) {
  const std::string head = "[scenario]\nkind = standard\nquantity = force_noise_vs_coupling\n[params]\n";
  const std::string good_params = "omega_m = 2pi*300kHz\ngamma_m = 2pi*30mHz\nkappa = 2pi*1MHz\n";
  const std::string grid = "[grid]\nmin = 0.1\nmax = 10\npoints = 11\n";
  EXPECT_EQ(parse_error_line(head + good_params + grid), -1);
  // unknown key
  EXPECT_EQ(parse_error_line(head + good_params + "kapa = 3\n" + grid), 8);
  // unreadable value
  EXPECT_EQ(parse_error_line(head + "omega_m = fast\ngamma_m = 1\nkappa = 1\n" + grid), 5);
  // line without '='
  EXPECT_EQ(parse_error_line(head + good_params + "oops\n" + grid), 8);
  // duplicate key
  EXPECT_EQ(parse_error_line(head + good_params + "kappa = 3\n" + grid), 8);
  // unknown section
  EXPECT_EQ(parse_error_line(head + good_params + grid + "[plot]\ncolor = red\n"), 12);
  // unknown scenario kind
  EXPECT_EQ(parse_error_line("[scenario]\nkind = bogus\n"), 2);
}

TEST(Config, TextRoundTrip) {
  const auto a = Config::load(recipe("fig12.toml"));
  const auto b = Config::parse(a.to_text(), "copy");
  EXPECT_EQ(a.to_text(), b.to_text());
}

TEST(Scenario, Fig8SqlBaseline) {
  const auto r = run_scenario(Config::load(recipe("fig8.toml")));
  const auto x = column(r.table, r.table.header[0]);
  double best = 1e300, at = 0;
  for (const auto& row : r.table.rows) {
    EXPECT_GE(row[1], 1.0 - 1e-12);
    if (row[1] < best) {
      best = row[1];
      at = row[x];
    }
  }
  EXPECT_NEAR(best, 1.0, 1e-10);
  EXPECT_NEAR(at, 1.0, 1e-9);
}

TEST(Scenario, Fig12Families) {
  const auto r = run_scenario(Config::load(recipe("fig12.toml")));
  EXPECT_EQ(r.table.header[0], "omega_rad_s");
  EXPECT_EQ(r.table.header[1], "omega_over_omega_m");
  EXPECT_EQ(r.table.header.size(), 3u + 10u);
  EXPECT_EQ(r.warnings.size(), 2u);  // the two xi_d > 1 hybrid sets
}

TEST(Scenario, ManifestRoundTripIsByteIdentical) {
  const auto cfg = Config::load(recipe("fig12.toml"));
  RunOptions o;
  o.omega_points = 41;
  const auto r = run_scenario(cfg, o);
  ManifestInfo m;
  m.command = "run";
  m.config_text = with_overrides(cfg, o).to_text();
  const auto manifest = make_manifest(m, r).dump(2);
  const auto again = run_scenario(Config::parse(config_text_from_manifest(manifest), "manifest"));
  EXPECT_EQ(to_csv(r.table), to_csv(again.table));
}

TEST(Scenario, SweepOrderingIsDeterministic) {
  const auto cfg = Config::load(recipe("fig9.toml"));
  RunOptions o;
  o.omega_points = 21;
  const std::vector<double> values{0, 10, 100};
  o.threads = 1;
  const auto a = sweep_scenario(cfg, "squeeze_N", values, o);
  o.threads = 4;
  const auto b = sweep_scenario(cfg, "squeeze_N", values, o);
  EXPECT_EQ(to_csv(a.table), to_csv(b.table));
  ASSERT_EQ(a.table.rows.size(), 3u * 21u);
  EXPECT_EQ(a.table.rows.front()[0], 0.0);
  EXPECT_EQ(a.table.rows.back()[0], 100.0);
  EXPECT_THROW(sweep_scenario(cfg, "no_such_param", values, o), ParseError);
}

TEST(Scenario, StabilityReport) {
  const auto res = check_stability(Config::load(recipe("fig12.toml")));
  int unstable = 0;
  for (const auto& s : res) unstable += !s.stable;
  EXPECT_EQ(res.size(), 5u);
  EXPECT_EQ(unstable, 2);
}

TEST(Scenario, CsvFormatting) {
  Table t{{"a", "b"}, {{1.0, 0.1}, {-2.5e-20, 3.0}}};
  EXPECT_EQ(to_csv(t), "a,b\n1,0.1\n-2.5e-20,3\n");
  EXPECT_EQ(format_number(0.1), "0.1");
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch_dir();
  EXPECT_EQ(run_lab("run " + recipe("fig8.toml") + " --out " + (dir / "f8.csv").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "f8.csv.manifest.json"));
  // rerun from the manifest alone
  EXPECT_EQ(run_lab("run " + (dir / "f8.csv.manifest.json").string() + " --out " + (dir / "f8b.csv").string()), 0);
  EXPECT_EQ(read_file((dir / "f8.csv").string()), read_file((dir / "f8b.csv").string()));

  const auto bad = write_temp("bad.toml", "[scenario]\nkind = standard\nquantity = detected\n[params]\nomega_m = ?\n");
  EXPECT_EQ(run_lab("run " + bad), 2);

  const auto unstable = write_temp("unstable.toml",
                                   "[scenario]\nkind = oracle\n[params]\nkappa = 10\ngamma_m = 1\ngamma_d = 1\n"
                                   "C0 = 0.04\nC1 = 0.5\nxi_d = 1.42\n[oracle]\nsystem = parametric\n"
                                   "trajectories = 2\nduration = 100\nseed = 1\n");
  EXPECT_EQ(run_lab("run " + unstable), 3);

  const auto pole = write_temp("pole.toml",
                               "[scenario]\nkind = parametric\nquantity = n_add\n[params]\nkappa = 10\n"
                               "gamma_m = 1\ngamma_d = 1\nC0 = 0.04\nC1 = 0\nxi_m = 1\nxi_d = 0\n"
                               "[grid]\nmin = -1\nmax = 1\npoints = 3\n");
  EXPECT_EQ(run_lab("run " + pole), 4);

  EXPECT_EQ(run_lab("check-stability " + recipe("fig12.toml")), 3);
  EXPECT_EQ(run_lab("derive-experiment " + recipe("fig12.toml")), 1);
  EXPECT_NE(run_lab("frobnicate"), 0);
}
