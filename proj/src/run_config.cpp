#include "qbm/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qbm {

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "m",    "T",    "hbar", "L",     "F",     "D",        "D_alt", "F_alt",  "sigma_x", "nx",
      "np",   "xmin", "xmax", "pmin",  "pmax",  "steps",    "out",   "scenario", "mode",  "state",
      "family", "seed", "eps", "t",    "dims",  "kappa",    "system"};
  return keys;
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool known_key(const std::string& key) {
  const auto& keys = config_keys();
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

const std::string& require_value(const KeyValues& values, const std::string& key) {
  const std::string& text = values.at(key);
  if (text.empty()) throw std::invalid_argument(key + ": missing value");
  return text;
}

std::optional<double> optional_number(const KeyValues& values, const std::string& key) {
  if (!values.count(key)) return std::nullopt;
  return parse_number(key, require_value(values, key));
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_number(key, text);
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) throw std::invalid_argument(key + ": expected a positive integer, got '" + text + "'");
  return static_cast<std::size_t>(v);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
  return out;
}

std::string parse_choice(const std::string& key, const std::string& text, const std::vector<std::string>& choices) {
  if (std::find(choices.begin(), choices.end(), text) != choices.end()) return text;
  std::string list;
  for (const auto& c : choices) list += (list.empty() ? "" : "|") + c;
  throw std::invalid_argument(key + ": expected one of " + list + ", got '" + text + "'");
}

}  // namespace

double parse_number(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  const auto result = std::from_chars(begin, end, value);
  if (text.empty() || result.ec != std::errc() || result.ptr != end || !std::isfinite(value)) {
    throw std::invalid_argument(key + ": expected a number, got '" + text + "'");
  }
  return value;
}

KeyValues parse_config_text(std::istream& in, const std::string& source) {
  KeyValues out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(number) + ": ";
    if (eq == std::string::npos) throw std::invalid_argument(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (!known_key(key)) throw std::invalid_argument(where + "unknown key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

KeyValues parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  return parse_config_text(in, path);
}

RunConfig build_run_config(const KeyValues& values) {
  for (const auto& [key, value] : values) {
    if (!known_key(key)) throw std::invalid_argument(key + ": unknown key");
  }
  RunConfig rc;
  ExperimentConfig& e = rc.experiment;
  if (auto v = optional_number(values, "m")) e.m = *v;
  if (auto v = optional_number(values, "T")) e.T = *v;
  if (auto v = optional_number(values, "hbar")) e.hbar = *v;
  if (auto v = optional_number(values, "F")) e.F = *v;
  if (auto v = optional_number(values, "D")) {
    e.D = *v;
    rc.has_diffusion = true;
  }
  e.L = optional_number(values, "L");
  e.validate();

  rc.d_alt = optional_number(values, "D_alt");
  if (rc.d_alt && !(*rc.d_alt >= 0.0)) throw std::invalid_argument("D_alt: must be >= 0");
  rc.f_alt = optional_number(values, "F_alt");
  rc.sigma_x = optional_number(values, "sigma_x");
  if (rc.sigma_x && !(*rc.sigma_x > 0.0)) throw std::invalid_argument("sigma_x: must be positive");

  if (values.count("nx")) rc.nx = parse_count("nx", require_value(values, "nx"));
  if (values.count("np")) rc.np = parse_count("np", require_value(values, "np"));
  if (values.count("steps")) rc.steps = static_cast<int>(parse_count("steps", require_value(values, "steps")));

  const char* bounds[] = {"xmin", "xmax", "pmin", "pmax"};
  int given = 0;
  for (const char* b : bounds) given += static_cast<int>(values.count(b));
  if (given != 0 && given != 4) {
    for (const char* b : bounds) {
      if (!values.count(b)) throw std::invalid_argument(std::string(b) + ": window bounds must be given together");
    }
  }
  if (given == 4) {
    Window w{optional_number(values, "xmin").value(), optional_number(values, "xmax").value(),
             optional_number(values, "pmin").value(), optional_number(values, "pmax").value()};
    if (!(w.xmin < w.xmax)) throw std::invalid_argument("xmax: must exceed xmin");
    if (!(w.pmin < w.pmax)) throw std::invalid_argument("pmax: must exceed pmin");
    rc.window = w;
  }

  if (values.count("out")) rc.out = require_value(values, "out");
  if (values.count("scenario")) {
    rc.scenario = parse_choice("scenario", require_value(values, "scenario"), {"sql-gaussian", "cat-fringes"});
  }
  if (values.count("mode")) rc.mode = parse_choice("mode", require_value(values, "mode"), {"analytic", "grid"});
  if (values.count("state")) rc.state = parse_choice("state", require_value(values, "state"), {"gaussian", "cat"});
  if (values.count("family")) {
    rc.family = parse_choice("family", require_value(values, "family"), {"noncontractive", "contractive", "cat"});
  }
  if (values.count("system")) rc.system = parse_choice("system", require_value(values, "system"), {"random", "commuting"});
  if (values.count("seed")) {
    const std::string& text = require_value(values, "seed");
    std::uint64_t seed = 0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
      throw std::invalid_argument("seed: expected a nonnegative integer, got '" + text + "'");
    }
    rc.seed = seed;
  }
  if (values.count("eps")) {
    rc.eps = parse_list("eps", require_value(values, "eps"));
    for (double v : rc.eps) {
      if (!(v > 0.0)) throw std::invalid_argument("eps: values must be positive");
    }
  }
  if (values.count("kappa")) {
    rc.kappa = parse_list("kappa", require_value(values, "kappa"));
    for (double v : rc.kappa) {
      if (!(v > 0.0)) throw std::invalid_argument("kappa: values must be positive");
    }
  }
  if (auto v = optional_number(values, "t")) {
    if (!(*v >= 0.0)) throw std::invalid_argument("t: must be >= 0");
    rc.t = *v;
  }
  if (values.count("dims")) {
    const std::string& text = require_value(values, "dims");
    const auto x = text.find('x');
    if (x == std::string::npos) throw std::invalid_argument("dims: expected PxE, got '" + text + "'");
    rc.d_probe = parse_count("dims", text.substr(0, x));
    rc.d_env = parse_count("dims", text.substr(x + 1));
  }
  return rc;
}

}  // namespace qbm
