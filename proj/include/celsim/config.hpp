#pragma once

// Plain-text run configuration.
//
//   # comment
//   A      = 10
//   kappa  = 0.5
//   eta    = 0.2
//   nbar_a = 0.5
//   nbar_b = 0.5
//   t_max  = 5
//   dt     = 0.01
//
// One `key = value` pair per line; blank lines and `#` comments are ignored.
// Unknown keys and malformed numbers are errors.

#include <charconv>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "celsim/model.hpp"

namespace celsim {

struct RunConfig {
  ModelParams params;
  double t_max = 5.0;
  double dt = 0.01;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line)
      : std::runtime_error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline bool parse_double(std::string_view text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace detail

/// Applies `key = value` to `config`. Returns false for an unknown key.
inline bool set_config_value(RunConfig& config, std::string_view key,
                             double value) {
  if (key == "A") config.params.A = value;
  else if (key == "kappa") config.params.kappa = value;
  else if (key == "eta") config.params.eta = value;
  else if (key == "nbar_a") config.params.nbar_a = value;
  else if (key == "nbar_b") config.params.nbar_b = value;
  else if (key == "t_max") config.t_max = value;
  else if (key == "dt") config.dt = value;
  else return false;
  return true;
}

/// Reads pairs on top of `base`, so a file only needs the keys it changes.
inline RunConfig parse_config(std::istream& in, RunConfig base = {}) {
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("expected `key = value`", line_no);
    const auto key = detail::trim(line.substr(0, eq));
    const auto text = detail::trim(line.substr(eq + 1));
    double value = 0.0;
    if (!detail::parse_double(text, value))
      throw ConfigError("malformed number for key '" + std::string(key) + "'",
                        line_no);
    if (!set_config_value(base, key, value))
      throw ConfigError("unknown key '" + std::string(key) + "'", line_no);
  }
  return base;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path, 0);
  return parse_config(in, base);
}

}  // namespace celsim
