#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlab {

/// Malformed config text or value, with file and line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& where, int line, const std::string& msg);
  int line() const { return line_; }

 private:
  int line_;
};

struct Entry {
  std::string key;
  std::string raw;
  int line = 0;
};

struct Section {
  std::string name;
  int line = 0;
  std::vector<Entry> entries;

  const Entry* find(const std::string& key) const;
};

/// Sectioned key = value text. `#` starts a comment; quotes around values are stripped.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  const std::string& origin() const { return origin_; }
  const std::vector<Section>& sections() const { return sections_; }
  const Section* section(const std::string& name) const;
  /// All sections whose name starts with `prefix` ("curve." etc), in file order.
  std::vector<const Section*> sections_with_prefix(const std::string& prefix) const;

  bool has(const std::string& sec, const std::string& key) const;
  std::string text(const std::string& sec, const std::string& key) const;
  std::string text_or(const std::string& sec, const std::string& key, const std::string& dflt) const;
  double number(const std::string& sec, const std::string& key) const;
  double number_or(const std::string& sec, const std::string& key, double dflt) const;
  std::vector<double> numbers(const std::string& sec, const std::string& key) const;

  /// Insert or replace a value (command-line overrides).
  void set(const std::string& sec, const std::string& key, const std::string& raw);

  /// Reject keys outside `allowed` for a section.
  void require_keys(const std::string& sec, const std::vector<std::string>& allowed) const;

  [[noreturn]] void fail(const std::string& sec, const std::string& key, const std::string& msg) const;
  [[noreturn]] void fail_at(int line, const std::string& msg) const;

  /// Canonical text; numbers keep the literal the user wrote.
  std::string to_text() const;

 private:
  std::string origin_;
  std::vector<Section> sections_;
};

/// Parse a scalar literal: `1.3e6`, `2pi*1.3MHz`, `780nm`, `10ng`, `0.1uK`, `24uW`.
/// Units scale to SI; `2pi*` multiplies by 2 pi; `Hz` carries no 2 pi on its own.
std::optional<double> parse_quantity(const std::string& s);

}  // namespace qlab
