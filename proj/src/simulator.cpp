#include "polcor/simulator.hpp"

#include "polcor/rng.hpp"

namespace polcor::sim {

using optics::AnalyzerPorts;
using optics::TaggedModeField;
using optics::analyzer_ports;
using optics::make_party_field;

void OpticalConfig::validate() const {
  if (n_bins < 1) throw std::invalid_argument("config: n_bins must be >= 1");
  if (!(duty > 0.0 && duty < 1.0)) throw std::invalid_argument("config: duty must be in (0, 1)");
  if (!(i0 > 0.0) || !std::isfinite(i0)) throw std::invalid_argument("config: i0 must be positive");
  for (double v : {theta, xi, psi_a, psi_b, eta})
    if (!std::isfinite(v)) throw std::invalid_argument("config: angles and phases must be finite");
}

std::vector<PulseBin> gen_schedule(std::uint64_t n_bins, double duty, std::uint64_t seed) {
  if (n_bins < 1) throw std::invalid_argument("gen_schedule: n_bins must be >= 1");
  if (!(duty > 0.0 && duty < 1.0))
    throw std::invalid_argument("gen_schedule: duty must be in (0, 1)");
  rng::Xoshiro256StarStar gen(seed);
  std::vector<PulseBin> schedule;
  schedule.reserve(n_bins);
  for (std::uint64_t i = 0; i < n_bins; ++i)
    schedule.push_back(PulseBin{i, gen.uniform01() < duty ? SourceTag::A : SourceTag::D});
  return schedule;
}

namespace {

DetectorSample digitize(std::uint64_t bin, SourceTag tag, const TaggedModeField& field,
                        double angle) {
  const AnalyzerPorts ports = analyzer_ports(angle, field);
  DetectorSample s;
  s.bin = bin;
  s.party = field.party;
  s.tag = tag;
  s.port1_coef_h = ports.port1.coef_h;
  s.port1_coef_v = ports.port1.coef_v;
  s.port2_coef_h = ports.port2.coef_h;
  s.port2_coef_v = ports.port2.coef_v;
  s.intensity_port1 = ports.port1.intensity();
  s.intensity_port2 = ports.port2.intensity();
  return s;
}

TaggedModeField party_bin_field(Party party, const PulseBin& bin, const OpticalConfig& cfg) {
  if (cfg.overlap == OverlapMode::Separated)
    return make_party_field(party, bin.tag, cfg.phases(), cfg.i0);
  // Coherent mode: both pulse classes share the bin; sum amplitudes.
  const TaggedModeField d = make_party_field(party, SourceTag::D, cfg.phases(), cfg.i0);
  const TaggedModeField a = make_party_field(party, SourceTag::A, cfg.phases(), cfg.i0);
  return TaggedModeField{party, bin.tag, d.coef_h + a.coef_h, d.coef_v + a.coef_v};
}

}  // namespace

BinOutputs propagate_bin(const PulseBin& bin, const OpticalConfig& cfg) {
  return BinOutputs{propagate_party_bin(Party::Alpha, bin, cfg),
                    propagate_party_bin(Party::Beta, bin, cfg)};
}

DetectorSample propagate_party_bin(Party party, const PulseBin& bin, const OpticalConfig& cfg) {
  cfg.validate();
  const double angle = party == Party::Alpha ? cfg.theta : cfg.xi;
  return digitize(bin.index, bin.tag, party_bin_field(party, bin, cfg), angle);
}

std::vector<DetectorSample> party_samples(Party party, std::span<const PulseBin> schedule,
                                          const OpticalConfig& cfg) {
  const DetectorSample per_tag[2] = {
      propagate_party_bin(party, PulseBin{0, SourceTag::D}, cfg),
      propagate_party_bin(party, PulseBin{0, SourceTag::A}, cfg)};
  std::vector<DetectorSample> out;
  out.reserve(schedule.size());
  for (const PulseBin& bin : schedule) {
    DetectorSample s = per_tag[static_cast<int>(bin.tag)];
    s.bin = bin.index;
    out.push_back(s);
  }
  return out;
}

double coherent_bin_intensity(double theta, double eta_party, double i0) {
  if (!(i0 > 0.0) || !std::isfinite(i0))
    throw std::invalid_argument("coherent_bin_intensity: i0 must be positive");
  return i0 * (1.0 - std::cos(2.0 * theta) * std::cos(eta_party));
}

SimulationRun simulate(const OpticalConfig& cfg) {
  cfg.validate();
  SimulationRun run;
  run.cfg = cfg;
  run.schedule = gen_schedule(cfg.n_bins, cfg.duty, cfg.seed);
  // Fields depend on the tag only, so party_samples propagates one bin per
  // tag and stamps indices; bit-identical to per-bin propagation.
  run.alice = party_samples(Party::Alpha, run.schedule, cfg);
  run.bob = party_samples(Party::Beta, run.schedule, cfg);
  return run;
}

}  // namespace polcor::sim
