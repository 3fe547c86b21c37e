#include "polcor/config_io.hpp"

#include <array>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "polcor/csv.hpp"

namespace polcor::cli {

namespace {

double parse_double(const std::string& key, const std::string& text) {
  double v{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || p != end)
    throw std::invalid_argument("config key '" + key + "': cannot parse '" + text + "' as number");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::uint64_t v{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || p != end)
    throw std::invalid_argument("config key '" + key + "': cannot parse '" + text +
                                "' as unsigned integer");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

sim::OverlapMode parse_overlap(const std::string& text) {
  if (text == "separated") return sim::OverlapMode::Separated;
  if (text == "coherent") return sim::OverlapMode::Coherent;
  throw std::invalid_argument("config key 'overlap': '" + text +
                              "' is not one of {separated, coherent}");
}

}  // namespace

ConfigOverrides parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  ConfigOverrides o;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "theta") o.theta = parse_double(key, value);
    else if (key == "xi") o.xi = parse_double(key, value);
    else if (key == "psi_a") o.psi_a = parse_double(key, value);
    else if (key == "psi_b") o.psi_b = parse_double(key, value);
    else if (key == "eta") o.eta = parse_double(key, value);
    else if (key == "i0") o.i0 = parse_double(key, value);
    else if (key == "duty") o.duty = parse_double(key, value);
    else if (key == "n_bins") o.n_bins = parse_u64(key, value);
    else if (key == "seed") o.seed = parse_u64(key, value);
    else if (key == "overlap") o.overlap = value;
    else
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": unknown config key '" +
                                  key + "'");
  }
  return o;
}

OpticalConfig build_config(const std::optional<std::string>& config_path,
                           const ConfigOverrides& flags) {
  OpticalConfig cfg;  // built-in defaults

  ConfigOverrides merged;
  if (config_path) merged = parse_config_file(*config_path);

  // Lowest-precedence seed source; only consulted when nothing else sets one.
  if (!merged.seed && !flags.seed)
    if (const char* env = std::getenv("POLCOR_SEED"); env != nullptr && *env != '\0')
      cfg.seed = parse_u64("POLCOR_SEED", env);
  const auto take = [](auto& dst, const auto& file_v, const auto& flag_v) {
    if (file_v) dst = *file_v;
    if (flag_v) dst = *flag_v;
  };
  take(cfg.theta, merged.theta, flags.theta);
  take(cfg.xi, merged.xi, flags.xi);
  take(cfg.psi_a, merged.psi_a, flags.psi_a);
  take(cfg.psi_b, merged.psi_b, flags.psi_b);
  take(cfg.eta, merged.eta, flags.eta);
  take(cfg.i0, merged.i0, flags.i0);
  take(cfg.duty, merged.duty, flags.duty);
  take(cfg.n_bins, merged.n_bins, flags.n_bins);
  take(cfg.seed, merged.seed, flags.seed);
  std::optional<std::string> overlap;
  take(overlap, merged.overlap, flags.overlap);
  if (overlap) cfg.overlap = parse_overlap(*overlap);

  if (!(cfg.duty > 0.0 && cfg.duty < 1.0))
    throw std::invalid_argument("config key 'duty': " + csv::format_double(cfg.duty) +
                                " out of accepted range (0, 1) exclusive");
  if (!(cfg.i0 > 0.0))
    throw std::invalid_argument("config key 'i0': must be > 0");
  if (cfg.n_bins < 1) throw std::invalid_argument("config key 'n_bins': must be >= 1");
  cfg.validate();
  return cfg;
}

double SweepSpec::value_at(int i) const {
  return start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

SweepSpec parse_sweep(const std::string& text) {
  SweepSpec s;
  std::size_t pos = 0;
  std::array<std::string, 4> parts;
  for (int i = 0; i < 4; ++i) {
    const auto colon = text.find(':', pos);
    if (i < 3 && colon == std::string::npos)
      throw std::invalid_argument("sweep spec must be NAME:START:STOP:STEPS, got '" + text + "'");
    parts[i] = text.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos);
    pos = colon + 1;
  }
  s.param = parts[0];
  s.start = parse_double("sweep start", parts[1]);
  s.stop = parse_double("sweep stop", parts[2]);
  s.steps = static_cast<int>(parse_u64("sweep steps", parts[3]));
  if (s.steps < 2) throw std::invalid_argument("sweep steps must be >= 2");
  with_param(OpticalConfig{}, s.param, s.start);  // validates the name
  return s;
}

OpticalConfig with_param(const OpticalConfig& cfg, const std::string& param, double value) {
  OpticalConfig out = cfg;
  if (param == "theta") out.theta = value;
  else if (param == "xi") out.xi = value;
  else if (param == "psi_a") out.psi_a = value;
  else if (param == "psi_b") out.psi_b = value;
  else if (param == "eta") out.eta = value;
  else if (param == "i0") out.i0 = value;
  else if (param == "duty") out.duty = value;
  else
    throw std::invalid_argument("sweep parameter '" + param +
                                "' is not a sweepable config field "
                                "(theta, xi, psi_a, psi_b, eta, i0, duty)");
  return out;
}

}  // namespace polcor::cli
