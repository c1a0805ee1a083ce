#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace qlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

struct Unit {
  const char* suffix;
  double scale;
};

// Longest suffixes first so "mHz" is not read as "m" + "Hz" and "MHz" stays mega.
constexpr Unit kUnits[] = {
    {"GHz", 1e9}, {"MHz", 1e6}, {"kHz", 1e3}, {"mHz", 1e-3}, {"Hz", 1.0},
    {"nm", 1e-9}, {"um", 1e-6}, {"mm", 1e-3},
    {"ng", 1e-12}, {"ug", 1e-9}, {"mg", 1e-6}, {"kg", 1.0}, {"g", 1e-3},
    {"nW", 1e-9}, {"uW", 1e-6}, {"mW", 1e-3}, {"W", 1.0},
    {"nK", 1e-9}, {"uK", 1e-6}, {"mK", 1e-3}, {"K", 1.0},
    {"us", 1e-6}, {"ms", 1e-3}, {"s", 1.0}, {"m", 1.0},
};

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

std::optional<double> plain_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

ParseError::ParseError(const std::string& where, int line, const std::string& msg)
    : std::runtime_error(where + ":" + std::to_string(line) + ": " + msg), line_(line) {}

const Entry* Section::find(const std::string& key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

std::optional<double> parse_quantity(const std::string& in) {
  std::string s;
  for (char c : in)
    if (c != ' ' && c != '_') s += c;
  double factor = 1.0;
  for (const char* pre : {"2pi*", "2*pi*"}) {
    if (s.rfind(pre, 0) == 0) {
      factor = 2.0 * std::numbers::pi;
      s = s.substr(std::char_traits<char>::length(pre));
      break;
    }
  }
  if (auto v = plain_number(s)) return factor * *v;
  for (const auto& u : kUnits) {
    if (ends_with(s, u.suffix)) {
      const auto head = s.substr(0, s.size() - std::char_traits<char>::length(u.suffix));
      if (auto v = plain_number(head)) return factor * *v * u.scale;
    }
  }
  return std::nullopt;
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') c.fail_at(lineno, "unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) c.fail_at(lineno, "empty section name");
      if (c.section(name)) c.fail_at(lineno, "duplicate section [" + name + "]");
      c.sections_.push_back({name, lineno, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) c.fail_at(lineno, "expected key = value");
    if (c.sections_.empty()) c.fail_at(lineno, "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) c.fail_at(lineno, "empty key");
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
    if (val.empty()) c.fail_at(lineno, "empty value for '" + key + "'");
    auto& sec = c.sections_.back();
    if (sec.find(key)) c.fail_at(lineno, "duplicate key '" + key + "' in [" + sec.name + "]");
    sec.entries.push_back({key, val, lineno});
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError(path, 0, "cannot open config file");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

const Section* Config::section(const std::string& name) const {
  for (const auto& s : sections_)
    if (s.name == name) return &s;
  return nullptr;
}

std::vector<const Section*> Config::sections_with_prefix(const std::string& prefix) const {
  std::vector<const Section*> out;
  for (const auto& s : sections_)
    if (s.name.rfind(prefix, 0) == 0) out.push_back(&s);
  return out;
}

bool Config::has(const std::string& sec, const std::string& key) const {
  const auto* s = section(sec);
  return s && s->find(key);
}

std::string Config::text(const std::string& sec, const std::string& key) const {
  const auto* s = section(sec);
  if (!s) fail_at(0, "missing section [" + sec + "]");
  const auto* e = s->find(key);
  if (!e) fail_at(s->line, "missing key '" + key + "' in [" + sec + "]");
  return e->raw;
}

std::string Config::text_or(const std::string& sec, const std::string& key,
                            const std::string& dflt) const {
  return has(sec, key) ? text(sec, key) : dflt;
}

double Config::number(const std::string& sec, const std::string& key) const {
  const std::string raw = text(sec, key);
  const auto v = parse_quantity(raw);
  if (!v || !std::isfinite(*v)) fail(sec, key, "cannot read '" + raw + "' as a number");
  return *v;
}

double Config::number_or(const std::string& sec, const std::string& key, double dflt) const {
  return has(sec, key) ? number(sec, key) : dflt;
}

std::vector<double> Config::numbers(const std::string& sec, const std::string& key) const {
  const std::string raw = text(sec, key);
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const auto v = parse_quantity(item);
    if (!v || !std::isfinite(*v)) fail(sec, key, "cannot read list item '" + item + "' as a number");
    out.push_back(*v);
  }
  if (out.empty()) fail(sec, key, "empty list");
  return out;
}

void Config::set(const std::string& sec, const std::string& key, const std::string& raw) {
  Section* s = nullptr;
  for (auto& x : sections_)
    if (x.name == sec) s = &x;
  if (!s) {
    sections_.push_back({sec, 0, {}});
    s = &sections_.back();
  }
  for (auto& e : s->entries)
    if (e.key == key) {
      e.raw = raw;
      return;
    }
  s->entries.push_back({key, raw, 0});
}

void Config::require_keys(const std::string& sec, const std::vector<std::string>& allowed) const {
  const auto* s = section(sec);
  if (!s) return;
  for (const auto& e : s->entries) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || a == e.key;
    if (!ok) fail_at(e.line, "unknown key '" + e.key + "' in [" + sec + "]");
  }
}

void Config::fail(const std::string& sec, const std::string& key, const std::string& msg) const {
  int line = 0;
  if (const auto* s = section(sec)) {
    line = s->line;
    if (const auto* e = s->find(key)) line = e->line;
  }
  throw ParseError(origin_, line, "[" + sec + "] " + key + ": " + msg);
}

void Config::fail_at(int line, const std::string& msg) const { throw ParseError(origin_, line, msg); }

std::string Config::to_text() const {
  std::string out;
  for (const auto& s : sections_) {
    out += "[" + s.name + "]\n";
    for (const auto& e : s.entries) out += e.key + " = " + e.raw + "\n";
    out += "\n";
  }
  return out;
}

}  // namespace qlab
