#include "polcor/algebra.hpp"

#include <array>

namespace polcor::algebra {

namespace {

using optics::SourceTag;
using optics::TaggedModeField;

struct UnitPorts {
  Complex h;
  Complex v;
};

// Analyzer output of one pulse class with the sqrt(i0/2) label amplitude
// divided out, leaving trig factors times the embedded modulator phase.
UnitPorts unit_ports(const TaggedModeField& f, double angle) {
  const double s = std::sqrt(f.intensity() / 2.0);
  if (!(s > 0.0)) throw std::invalid_argument("expand_joint: zero-intensity field");
  return UnitPorts{f.coef_h * (std::cos(angle) / s), f.coef_v * (std::sin(angle) / s)};
}

BasisClass classify(Mode a, Mode b) {
  return a == b ? BasisClass::SamePol : BasisClass::CrossPol;
}

}  // namespace

std::vector<ProductTerm> ReducedJoint::as_terms() const {
  return {ProductTerm{Mode::H, Mode::H, SourcePair::DD, BasisClass::SamePol, same_pol},
          ProductTerm{Mode::H, Mode::V, SourcePair::DD, BasisClass::CrossPol, cross_pol}};
}

std::vector<ProductTerm> expand_joint(const PartyFieldPair& alpha, const PartyFieldPair& beta,
                                      double port_a, double port_b) {
  if (alpha.d.tag != SourceTag::D || alpha.a.tag != SourceTag::A ||
      beta.d.tag != SourceTag::D || beta.a.tag != SourceTag::A)
    throw std::invalid_argument("expand_joint: each party needs a D-class and an A-class field");

  const UnitPorts ad = unit_ports(alpha.d, port_a);
  const UnitPorts aa = unit_ports(alpha.a, port_a);
  const UnitPorts bd = unit_ports(beta.d, port_b);
  const UnitPorts ba = unit_ports(beta.a, port_b);

  const auto pick = [](const UnitPorts& p, Mode m) { return m == Mode::H ? p.h : p.v; };
  const std::array<Mode, 2> modes{Mode::H, Mode::V};

  std::vector<ProductTerm> terms;
  terms.reserve(16);
  for (SourcePair src : {SourcePair::DD, SourcePair::AA, SourcePair::DA, SourcePair::AD}) {
    const UnitPorts& pa = (src == SourcePair::DD || src == SourcePair::DA) ? ad : aa;
    const UnitPorts& pb = (src == SourcePair::DD || src == SourcePair::AD) ? bd : ba;
    for (Mode ma : modes)
      for (Mode mb : modes) {
        Complex coef = pick(pa, ma) * pick(pb, mb);
        if (src == SourcePair::DA || src == SourcePair::AD) coef = Complex{};
        terms.push_back(ProductTerm{ma, mb, src, classify(ma, mb), coef});
      }
  }
  return terms;
}

ReducedJoint reduce(std::span<const ProductTerm> terms) {
  ReducedJoint out;
  for (const ProductTerm& t : terms) {
    if (!optics::is_finite(t.coef)) throw std::invalid_argument("reduce: non-finite coefficient");
    if (t.zero_rule() != nullptr) {
      if (std::norm(t.coef) != 0.0)
        throw std::invalid_argument("reduce: nonzero DA/AD term violates the temporal rule");
      continue;
    }
    if (t.basis_class != classify(t.alpha_mode, t.beta_mode))
      throw std::invalid_argument("reduce: term class does not match its mode labels");
    (t.basis_class == BasisClass::SamePol ? out.same_pol : out.cross_pol) += t.coef;
  }
  return out;
}

double closed_form_R(DetectorPair pair, double theta, double xi, double eta_ab, double i0) {
  if (!(i0 > 0.0) || !std::isfinite(i0))
    throw std::invalid_argument("closed_form_R: i0 must be positive");
  // Shifting both ports by pi/2 (CD vs AB, BC vs AD) leaves cos(t-x)
  // unchanged and only flips the sign of sin(t+x), so the two members of
  // each family share one form; evaluating the reduced form keeps the
  // R_CD = R_AB and R_BC = R_AD symmetry exact.
  double same_pol_amp, cross_pol_amp;
  switch (pair) {
    case DetectorPair::AB:
    case DetectorPair::CD:
      same_pol_amp = std::cos(theta - xi);
      cross_pol_amp = std::sin(theta + xi);
      break;
    case DetectorPair::AD:
    case DetectorPair::BC:
      same_pol_amp = std::sin(theta - xi);
      cross_pol_amp = std::cos(theta + xi);
      break;
    default: throw std::invalid_argument("closed_form_R: unknown detector pair");
  }
  const double ch = std::cos(eta_ab / 2.0);
  const double sh = std::sin(eta_ab / 2.0);
  return i0 * i0 *
         (same_pol_amp * same_pol_amp * ch * ch + cross_pol_amp * cross_pol_amp * sh * sh);
}

double intensity_expectation(Party party, double theta, const PhaseSet& phases, double i0) {
  if (!(i0 > 0.0) || !std::isfinite(i0))
    throw std::invalid_argument("intensity_expectation: i0 must be positive");
  if (!std::isfinite(theta) || !std::isfinite(phases.eta_party(party)))
    throw std::invalid_argument("intensity_expectation: non-finite angle or phase");
  // Each pulse class contributes i0/2 * (cos^2 + sin^2) once the temporal
  // rule removes the D-A cross terms; the Pythagorean identity collapses the
  // angle dependence, so the expectation is i0 for every theta and phase.
  return i0;
}

}  // namespace polcor::algebra
