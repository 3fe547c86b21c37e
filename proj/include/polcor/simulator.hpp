#pragma once
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polcor/optics.hpp"

namespace polcor::sim {

using optics::Complex;
using optics::Party;
using optics::PhaseSet;
using optics::SourceTag;

/// Separated: D and A pulses occupy distinct time bins and never interfere.
/// Coherent: both pulse classes share each bin and are summed as amplitudes
/// before the analyzer (removes the temporal separation).
enum class OverlapMode : unsigned char { Separated = 0, Coherent = 1 };

inline const char* to_string(OverlapMode m) {
  return m == OverlapMode::Separated ? "separated" : "coherent";
}

/// Full experiment parameter set. Phases are treated as stable for the whole
/// run (a perfectly coherent source), so any two paired bins share a fixed
/// relative phase.
struct OpticalConfig {
  double theta{0.0};   ///< Alice analyzer angle
  double xi{0.0};      ///< Bob analyzer angle
  double psi_a{0.0};   ///< Alice MZI path phase
  double psi_b{0.0};   ///< Bob MZI path phase
  double eta{0.0};     ///< modulator phase
  double i0{1.0};      ///< per-bin per-party intensity
  std::uint64_t n_bins{100000};
  double duty{0.5};    ///< fraction of A-tagged bins
  std::uint64_t seed{1};
  OverlapMode overlap{OverlapMode::Separated};

  PhaseSet phases() const { return PhaseSet{eta, psi_a, psi_b}; }
  void validate() const;
};

struct PulseBin {
  std::uint64_t index;
  SourceTag tag;
};

/// One time bin's digitized output for one party: analyzer port coefficients
/// and their intensities. In Separated mode port intensities sum to i0.
struct DetectorSample {
  std::uint64_t bin{};
  Party party{Party::Alpha};
  SourceTag tag{SourceTag::D};
  Complex port1_coef_h{}, port1_coef_v{};
  Complex port2_coef_h{}, port2_coef_v{};
  double intensity_port1{};
  double intensity_port2{};

  double full_field() const { return intensity_port1 + intensity_port2; }
};

/// Random modulator switching: each bin is independently A with probability
/// `duty`, D otherwise. Fixed generator (xoshiro256** seeded via splitmix64),
/// so a seed gives the same schedule on every platform.
std::vector<PulseBin> gen_schedule(std::uint64_t n_bins, double duty, std::uint64_t seed);

/// Propagates one bin through both parties' optics: party field for the
/// bin's tag (Coherent mode: amplitude sum of both tags), then the analyzer
/// at theta (Alice) / xi (Bob). The source splitter's per-party factor is
/// absorbed in the field normalization, so each party sees intensity i0 per
/// bin in Separated mode.
struct BinOutputs {
  DetectorSample alice;
  DetectorSample bob;
};
BinOutputs propagate_bin(const PulseBin& bin, const OpticalConfig& cfg);

/// One party's detector sample for one bin; uses only that party's analyzer
/// angle and path phase.
DetectorSample propagate_party_bin(Party party, const PulseBin& bin, const OpticalConfig& cfg);

/// One party's full bin-ordered stream for a schedule.
std::vector<DetectorSample> party_samples(Party party, std::span<const PulseBin> schedule,
                                          const OpticalConfig& cfg);

/// Port-1 intensity of one party in Coherent mode:
///   i0 * (1 - cos(2*theta) * cos(eta_party)),
/// the interference fringe that appears when the temporal separation between
/// the D and A pulses is removed.
double coherent_bin_intensity(double theta, double eta_party, double i0);

/// Schedule plus both parties' sample streams, in bin order.
struct SimulationRun {
  OpticalConfig cfg;
  std::vector<PulseBin> schedule;
  std::vector<DetectorSample> alice;
  std::vector<DetectorSample> bob;
};
SimulationRun simulate(const OpticalConfig& cfg);

}  // namespace polcor::sim
