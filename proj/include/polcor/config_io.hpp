#pragma once
#include <optional>
#include <string>

#include "polcor/simulator.hpp"

namespace polcor::cli {

using sim::OpticalConfig;

/// Values supplied on the command line; unset fields fall back to the config
/// file, then the environment seed, then the built-in defaults.
struct ConfigOverrides {
  std::optional<double> theta, xi, psi_a, psi_b, eta, i0, duty;
  std::optional<std::uint64_t> n_bins, seed;
  std::optional<std::string> overlap;
};

/// Flat key=value config file; '#' starts a comment. Unknown keys are
/// rejected by name. Returns only the keys present.
ConfigOverrides parse_config_file(const std::string& path);

/// Resolves defaults < POLCOR_SEED env < config file < flags, then validates
/// ranges (error messages carry the key and accepted range).
OpticalConfig build_config(const std::optional<std::string>& config_path,
                           const ConfigOverrides& flags);

/// NAME:START:STOP:STEPS over one of the real-valued config fields.
struct SweepSpec {
  std::string param;
  double start{};
  double stop{};
  int steps{};

  double value_at(int i) const;
};

SweepSpec parse_sweep(const std::string& text);

/// Returns cfg with the named sweep field replaced.
OpticalConfig with_param(const OpticalConfig& cfg, const std::string& param, double value);

}  // namespace polcor::cli
