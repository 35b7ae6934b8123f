#pragma once

// Run configuration for the command-line front end: `key = value` files
// with `#` comments, overridden by `--key value` flags.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qbm/sql_limits.hpp"
#include "qbm/wigner_grid.hpp"

namespace qbm {

/// Keys accepted in config files and as flags, in a fixed order.
const std::vector<std::string>& config_keys();

/// Raw key -> value text. An empty value means the key was given without one.
using KeyValues = std::map<std::string, std::string>;

/// Throws std::invalid_argument ("<source>:<line>: ...") on malformed lines
/// and unknown keys. Later lines override earlier ones.
KeyValues parse_config_text(std::istream& in, const std::string& source);
KeyValues parse_config_file(const std::string& path);

struct RunConfig {
  ExperimentConfig experiment;
  /// Whether D was given explicitly (scenarios supply their own default).
  bool has_diffusion = false;
  std::optional<double> d_alt;
  std::optional<double> f_alt;
  std::optional<double> sigma_x;
  std::size_t nx = 512;
  std::size_t np = 512;
  /// All four bounds or none (auto sizing).
  std::optional<Window> window;
  int steps = 64;
  std::string out = ".";
  std::string scenario;
  std::string mode = "analytic";
  std::string state = "cat";
  std::string family = "noncontractive";
  std::uint64_t seed = 42;
  std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
  double t = 1.0;
  std::size_t d_probe = 2;
  std::size_t d_env = 3;
  std::vector<double> kappa{1.0, 0.1, 0.01};
  std::string system = "random";
};

/// Applies defaults (m = T = hbar = 1) and validates every given key.
/// Errors are std::invalid_argument whose message starts with the key.
RunConfig build_run_config(const KeyValues& values);

/// Parses a finite double, naming `key` in the error.
double parse_number(const std::string& key, const std::string& text);

}  // namespace qbm
