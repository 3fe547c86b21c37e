#pragma once
#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "polcor/algebra.hpp"
#include "polcor/simulator.hpp"

namespace polcor::meas {

using algebra::DetectorPair;
using algebra::PairFamily;
using optics::Party;
using optics::PhaseSet;
using sim::DetectorSample;
using sim::OpticalConfig;
using sim::PulseBin;

/// Per-port mean intensities of one party's stream.
struct LocalStats {
  Party party{Party::Alpha};
  std::uint64_t n{0};
  double port1_mean{0}, port1_std_err{0};
  double port2_mean{0}, port2_std_err{0};
  double full_field_mean{0}, full_field_std_err{0};
};
LocalStats local_stats(std::span<const DetectorSample> stream);

/// D->A pairing of a pulse schedule. Greedy and forward: each D bin takes
/// the nearest subsequent A bin that no earlier D has claimed. Unpaired bins
/// are discarded and counted.
struct BinPairing {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;  ///< (d_bin, a_bin)
  std::uint64_t n_bins{0};
  std::uint64_t discarded{0};
  double discarded_fraction{0};
};
BinPairing pair_bins(std::span<const PulseBin> schedule);

/// Estimated and closed-form joint correlation for one detector pair.
struct PairCorrelation {
  DetectorPair pair{DetectorPair::AB};
  double estimate{0};
  double closed_form{0};
  std::uint64_t n_pairs{0};
  double discarded_fraction{0};
  double std_err{0};
};

/// Selective joint-correlation estimate over paired bins. For each (D, A)
/// pair the two bins' port-product amplitudes are added coherently with their
/// recorded phases, reduced to the same-pol/cross-pol classes, and squared.
/// Port map per pair: AB = Alice p1 x Bob p1, CD = p2 x p2, AD = p1 x p2,
/// BC = p2 x p1. Streams must be dense and bin-ordered. Only defined for
/// Separated-mode streams; the config supplies phases, i0 and the analyzer
/// angles for the closed-form column.
PairCorrelation estimate_R(const BinPairing& pairing, std::span<const DetectorSample> alice,
                           std::span<const DetectorSample> bob, DetectorPair pair,
                           const OpticalConfig& cfg);

/// All four pair correlations from one simulation run.
std::array<PairCorrelation, 4> estimate_all_pairs(const sim::SimulationRun& run);

/// Standard coincidence normalization
///   E = (R_AB + R_CD - R_AD - R_BC) / (R_AB + R_CD + R_AD + R_BC).
double correlation_E(double r_ab, double r_cd, double r_ad, double r_bc);
double correlation_E(const std::array<PairCorrelation, 4>& pairs);

/// E from the closed forms; equals cos 2(theta - xi) at eta_ab = 2n pi.
double correlation_E_closed(double theta, double xi, double eta_ab, double i0);

struct ChshResult {
  double a{}, a_prime{}, b{}, b_prime{};
  double e_ab{}, e_ab_prime{}, e_aprime_b{}, e_aprime_bprime{};
  double s_value{};
};

/// S = E(a,b) - E(a,b') + E(a',b) + E(a',b') from the closed forms.
ChshResult chsh_closed_form(double a, double a_prime, double b, double b_prime, double eta_ab,
                            double i0);

/// Same combination with every E estimated from a full simulated run at that
/// analyzer setting (base config's seed and phases, theta/xi overridden).
ChshResult chsh_mc(const OpticalConfig& base, double a, double a_prime, double b, double b_prime);

enum class BellLabel : unsigned char { PhiPlus, PsiPlus, PsiMinus, PhiMinus };
inline const char* to_string(BellLabel l) {
  switch (l) {
    case BellLabel::PhiPlus: return "phi+";
    case BellLabel::PsiPlus: return "psi+";
    case BellLabel::PsiMinus: return "psi-";
    default: return "phi-";
  }
}

/// Maps the fixed two-party phase onto the fringe family's Bell-state label.
/// Defined only when eta_ab mod 2pi is within tol of 0 or pi.
BellLabel classify_bell_state(double eta_ab, PairFamily family, double tol = 1e-6);

}  // namespace polcor::meas
