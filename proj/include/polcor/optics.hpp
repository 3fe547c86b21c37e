#pragma once
#include <cmath>
#include <complex>
#include <stdexcept>

namespace polcor::optics {

using Complex = std::complex<double>;

inline bool is_finite(Complex c) {
  return std::isfinite(c.real()) && std::isfinite(c.imag());
}

enum class Party : unsigned char { Alpha = 0, Beta = 1 };
enum class SourceTag : unsigned char { D = 0, A = 1 };

inline const char* to_string(Party p) { return p == Party::Alpha ? "alpha" : "beta"; }
inline const char* to_string(SourceTag t) { return t == SourceTag::D ? "D" : "A"; }

/// Polarization state as complex coefficients on the H and V axes.
struct JonesVector {
  Complex h{};
  Complex v{};

  double norm2() const { return std::norm(h) + std::norm(v); }
};

/// Half-wave plate with its fast axis at angle phi from horizontal.
/// Maps a linear polarization at angle rho to 2*phi - rho.
JonesVector apply_hwp(double phi, const JonesVector& in);

/// Polarizing beam splitter: splits a field into its H-axis and V-axis ports.
struct PbsPorts {
  Complex h_port;
  Complex v_port;
};
PbsPorts apply_pbs(const JonesVector& in);

/// Local and modulator phases. Derived sums are always recomputed from the
/// primitives; values are kept unreduced for arithmetic.
struct PhaseSet {
  double eta{0.0};    ///< modulator-induced fixed phase
  double psi_a{0.0};  ///< Alice MZI path phase
  double psi_b{0.0};  ///< Bob MZI path phase

  double eta_alpha() const { return eta + psi_a; }
  double eta_beta() const { return eta + psi_b; }
  double eta_ab() const { return eta_alpha() + eta_beta(); }
  double eta_party(Party p) const { return p == Party::Alpha ? eta_alpha() : eta_beta(); }
};

/// Per-bin, per-party field: complex coefficients on the orthogonal,
/// distinguishable H and V mode labels, plus the source tag of the pulse.
/// Intensity is always |coef_h|^2 + |coef_v|^2, never |coef_h + coef_v|^2.
struct TaggedModeField {
  Party party{Party::Alpha};
  SourceTag tag{SourceTag::D};
  Complex coef_h{};
  Complex coef_v{};

  double intensity() const { return std::norm(coef_h) + std::norm(coef_v); }
};

/// Both pulse classes of one party, as produced by make_party_field.
struct PartyFieldPair {
  TaggedModeField d;
  TaggedModeField a;
};

/// Builds the per-party field of one pulse class. With s = sqrt(i0/2):
/// a D pulse carries (s, s); an A pulse carries (-s, s) * e^{i eta_party}.
/// Per-bin per-party intensity is i0 for either tag.
TaggedModeField make_party_field(Party party, SourceTag tag, const PhaseSet& phases, double i0);

PartyFieldPair make_party_fields(Party party, const PhaseSet& phases, double i0);

/// Analyzer (HWP at angle/2 followed by a PBS), parameterized by the
/// projection angle directly. Mode labels stay distinct through the
/// projection: port 1 scales coefficients as (coef_h*cos, coef_v*sin),
/// port 2 is port 1 evaluated at angle + pi/2. Port intensities sum to
/// the input intensity.
struct AnalyzerPorts {
  TaggedModeField port1;
  TaggedModeField port2;
};
AnalyzerPorts analyzer_ports(double angle, const TaggedModeField& f);

}  // namespace polcor::optics
