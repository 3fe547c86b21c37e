#pragma once
#include <filesystem>
#include <span>
#include <string>

#include "polcor/measurement.hpp"

namespace polcor::csv {

using meas::LocalStats;
using meas::PairCorrelation;
using sim::OpticalConfig;

/// Shortest round-trip decimal form (std::to_chars), identical on every
/// conforming platform; used for all numeric CSV fields.
std::string format_double(double v);

/// "# config: ..." and "# reproduce: ..." comment lines carrying the full
/// resolved configuration and seed.
std::string config_comment(const OpticalConfig& cfg, const std::string& reproduce_subcommand);

/// Correlation table, one row per detector pair. The networked correlator
/// and the in-process pipeline both emit exactly these bytes.
std::string correlation_csv(const OpticalConfig& cfg, std::span<const PairCorrelation> rows);

/// One row per sweep point per party.
struct LocalScanRow {
  std::string param;
  double value;
  LocalStats stats;
};
std::string local_scan_csv(const OpticalConfig& cfg, std::span<const LocalScanRow> rows);

std::string chsh_csv(const OpticalConfig& cfg, const meas::ChshResult& closed,
                     const meas::ChshResult& mc);

/// Writes via a temp file in the same directory plus rename.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace polcor::csv
