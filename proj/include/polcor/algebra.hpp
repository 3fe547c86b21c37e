#pragma once
#include <span>
#include <vector>

#include "polcor/optics.hpp"

namespace polcor::algebra {

using optics::Complex;
using optics::PartyFieldPair;
using optics::PhaseSet;
using optics::Party;

enum class Mode : unsigned char { H = 0, V = 1 };
enum class SourcePair : unsigned char { DD = 0, AA = 1, DA = 2, AD = 3 };
enum class BasisClass : unsigned char { SamePol = 0, CrossPol = 1 };
enum class DetectorPair : unsigned char { AB = 0, CD = 1, AD = 2, BC = 3 };
enum class PairFamily : unsigned char { SamePort = 0, CrossPort = 1 };

inline const char* to_string(Mode m) { return m == Mode::H ? "H" : "V"; }
inline const char* to_string(SourcePair s) {
  switch (s) {
    case SourcePair::DD: return "DD";
    case SourcePair::AA: return "AA";
    case SourcePair::DA: return "DA";
    default: return "AD";
  }
}
inline const char* to_string(BasisClass b) { return b == BasisClass::SamePol ? "same-pol" : "cross-pol"; }
inline const char* to_string(DetectorPair p) {
  switch (p) {
    case DetectorPair::AB: return "AB";
    case DetectorPair::CD: return "CD";
    case DetectorPair::AD: return "AD";
    default: return "BC";
  }
}

/// AB and CD read the two parties' matching analyzer ports, AD and BC the
/// opposite ones.
inline PairFamily pair_family(DetectorPair p) {
  return (p == DetectorPair::AB || p == DetectorPair::CD) ? PairFamily::SamePort
                                                          : PairFamily::CrossPort;
}

/// One second-order product-basis element. Coefficients are dimensionless:
/// amplitudes are normalized so each party's per-label magnitude is 1, with
/// the A-class modulator phases kept in the coefficient. Same-pol terms
/// (HH, VV) and cross-pol terms (HV, VH) are orthogonal classes; magnitudes
/// across classes combine by sum of squares only.
struct ProductTerm {
  Mode alpha_mode;
  Mode beta_mode;
  SourcePair source;
  BasisClass basis_class;
  Complex coef;

  /// Reduction rule that forces this term to zero, or nullptr if it is kept.
  const char* zero_rule() const {
    return (source == SourcePair::DA || source == SourcePair::AD)
               ? "no temporal overlap between D and A pulses"
               : nullptr;
  }
};

/// Joint correlation after merging HH with VV (same-pol) and HV with VH
/// (cross-pol) and summing the DD and AA source pairs coherently.
/// The value is scale * (|same_pol|^2 + |cross_pol|^2) in units of I_0^2;
/// scale = 1/4 absorbs the two per-party 1/sqrt(2) label amplitudes.
struct ReducedJoint {
  Complex same_pol{};
  Complex cross_pol{};
  double scale{0.25};

  double value() const { return scale * (std::norm(same_pol) + std::norm(cross_pol)); }

  /// Re-expresses the reduction as a two-term list (for idempotence checks
  /// and display).
  std::vector<ProductTerm> as_terms() const;
};

/// Expands the joint amplitude product of two parties' analyzer outputs into
/// the 16 product-basis terms: HH/HV/VH/VV for each of DD, AA, DA, AD.
/// DA and AD terms are emitted as explicit zeros (no temporal overlap).
/// port_a / port_b are the analyzer projection angles; pass angle + pi/2 for
/// the orthogonal port.
std::vector<ProductTerm> expand_joint(const PartyFieldPair& alpha, const PartyFieldPair& beta,
                                      double port_a, double port_b);

/// Merges an expansion into same-pol / cross-pol coefficients. Idempotent and
/// linear in the input coefficients. Rejects term lists that violate the
/// temporal zeroing rule.
ReducedJoint reduce(std::span<const ProductTerm> terms);

/// Closed-form joint correlation
///   R = i0^2 [cos^2(t - x) cos^2(eta_ab/2) + sin^2(t + x) sin^2(eta_ab/2)]
/// with (t, x) = (theta, xi) for AB, both shifted by pi/2 for CD, and the
/// single-sided shifts for AD / BC.
double closed_form_R(DetectorPair pair, double theta, double xi, double eta_ab, double i0);

/// Mean full-field intensity of one party behind its analyzer. The temporal
/// rule removes every D-A cross term and each pulse class reduces to
/// (cos^2 + sin^2) * i0/2, so the expectation is i0 for every angle and
/// every phase setting.
double intensity_expectation(Party party, double theta, const PhaseSet& phases, double i0);

}  // namespace polcor::algebra
