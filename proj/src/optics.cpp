#include "polcor/optics.hpp"

namespace polcor::optics {

JonesVector apply_hwp(double phi, const JonesVector& in) {
  if (!std::isfinite(phi) || !is_finite(in.h) || !is_finite(in.v))
    throw std::invalid_argument("apply_hwp: non-finite input");
  const double c = std::cos(2.0 * phi);
  const double s = std::sin(2.0 * phi);
  return JonesVector{in.h * c + in.v * s, in.h * s - in.v * c};
}

PbsPorts apply_pbs(const JonesVector& in) {
  if (!is_finite(in.h) || !is_finite(in.v))
    throw std::invalid_argument("apply_pbs: non-finite input");
  return PbsPorts{in.h, in.v};
}

TaggedModeField make_party_field(Party party, SourceTag tag, const PhaseSet& phases, double i0) {
  if (!(i0 > 0.0) || !std::isfinite(i0))
    throw std::invalid_argument("make_party_field: i0 must be positive");
  const double s = std::sqrt(i0 / 2.0);
  if (tag == SourceTag::D) return TaggedModeField{party, tag, Complex{s, 0.0}, Complex{s, 0.0}};
  const Complex phase = std::polar(1.0, phases.eta_party(party));
  return TaggedModeField{party, tag, -s * phase, s * phase};
}

PartyFieldPair make_party_fields(Party party, const PhaseSet& phases, double i0) {
  return PartyFieldPair{make_party_field(party, SourceTag::D, phases, i0),
                        make_party_field(party, SourceTag::A, phases, i0)};
}

AnalyzerPorts analyzer_ports(double angle, const TaggedModeField& f) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  TaggedModeField p1{f.party, f.tag, f.coef_h * c, f.coef_v * s};
  TaggedModeField p2{f.party, f.tag, f.coef_h * -s, f.coef_v * c};
  return AnalyzerPorts{p1, p2};
}

}  // namespace polcor::optics
