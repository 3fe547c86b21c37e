#include "polcor/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace polcor::csv {

using algebra::to_string;
using sim::to_string;

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), end);
}

static std::string config_flags(const OpticalConfig& c) {
  std::string s;
  s += "--theta " + format_double(c.theta) + " --xi " + format_double(c.xi);
  s += " --psi-a " + format_double(c.psi_a) + " --psi-b " + format_double(c.psi_b);
  s += " --eta " + format_double(c.eta) + " --i0 " + format_double(c.i0);
  s += " --bins " + std::to_string(c.n_bins) + " --duty " + format_double(c.duty);
  s += " --seed " + std::to_string(c.seed);
  s += std::string(" --overlap ") + to_string(c.overlap);
  return s;
}

std::string config_comment(const OpticalConfig& c, const std::string& reproduce_subcommand) {
  std::string s = "# config: theta=" + format_double(c.theta) + " xi=" + format_double(c.xi) +
                  " psi_a=" + format_double(c.psi_a) + " psi_b=" + format_double(c.psi_b) +
                  " eta=" + format_double(c.eta) + " i0=" + format_double(c.i0) +
                  " n_bins=" + std::to_string(c.n_bins) + " duty=" + format_double(c.duty) +
                  " seed=" + std::to_string(c.seed) + " overlap=" + to_string(c.overlap) + "\n";
  s += "# reproduce: polcor " + reproduce_subcommand + " " + config_flags(c) + "\n";
  return s;
}

std::string correlation_csv(const OpticalConfig& cfg, std::span<const PairCorrelation> rows) {
  std::string s = "# polcor correlation\n";
  s += config_comment(cfg, "simulate");
  s += "pair,theta,xi,psi_a,psi_b,eta,eta_ab,n_pairs,discarded_fraction,estimate,closed_form,std_err\n";
  const double eta_ab = cfg.phases().eta_ab();
  for (const PairCorrelation& r : rows) {
    s += to_string(r.pair);
    s += "," + format_double(cfg.theta) + "," + format_double(cfg.xi);
    s += "," + format_double(cfg.psi_a) + "," + format_double(cfg.psi_b);
    s += "," + format_double(cfg.eta) + "," + format_double(eta_ab);
    s += "," + std::to_string(r.n_pairs) + "," + format_double(r.discarded_fraction);
    s += "," + format_double(r.estimate) + "," + format_double(r.closed_form);
    s += "," + format_double(r.std_err) + "\n";
  }
  return s;
}

std::string local_scan_csv(const OpticalConfig& cfg, std::span<const LocalScanRow> rows) {
  std::string s = "# polcor local-scan\n";
  s += config_comment(cfg, "local-scan");
  s += "param,value,party,n,port1_mean,port1_std_err,port2_mean,port2_std_err,"
       "full_field_mean,full_field_std_err\n";
  for (const LocalScanRow& r : rows) {
    s += r.param + "," + format_double(r.value) + "," + optics::to_string(r.stats.party);
    s += "," + std::to_string(r.stats.n);
    s += "," + format_double(r.stats.port1_mean) + "," + format_double(r.stats.port1_std_err);
    s += "," + format_double(r.stats.port2_mean) + "," + format_double(r.stats.port2_std_err);
    s += "," + format_double(r.stats.full_field_mean) + "," +
         format_double(r.stats.full_field_std_err) + "\n";
  }
  return s;
}

std::string chsh_csv(const OpticalConfig& cfg, const meas::ChshResult& closed,
                     const meas::ChshResult& mc) {
  std::string s = "# polcor chsh\n";
  s += config_comment(cfg, "chsh");
  s += "mode,a,a_prime,b,b_prime,e_ab,e_ab_prime,e_aprime_b,e_aprime_bprime,s_value\n";
  const auto row = [](const char* mode, const meas::ChshResult& r) {
    std::string t = mode;
    t += "," + format_double(r.a) + "," + format_double(r.a_prime);
    t += "," + format_double(r.b) + "," + format_double(r.b_prime);
    t += "," + format_double(r.e_ab) + "," + format_double(r.e_ab_prime);
    t += "," + format_double(r.e_aprime_b) + "," + format_double(r.e_aprime_bprime);
    t += "," + format_double(r.s_value) + "\n";
    return t;
  };
  s += row("closed_form", closed);
  s += row("monte_carlo", mc);
  return s;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  const fs::path tmp = dir / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace polcor::csv
