#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polcor/optics.hpp"
#include "polcor/rng.hpp"

using namespace polcor::optics;

namespace {

constexpr double kTol = 1e-12;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

bool close(Complex a, Complex b, double tol = kTol) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("hwp examples") {
  // 22.5 deg plate turns vertical light into the diagonal class.
  const JonesVector d = apply_hwp(M_PI / 8.0, JonesVector{{0, 0}, {1, 0}});
  CHECK(close(d.h, Complex{std::sin(M_PI / 4.0), 0}));
  CHECK(close(d.v, Complex{-std::cos(M_PI / 4.0), 0}));
  CHECK(std::abs(std::abs(d.h) - kInvSqrt2) <= kTol);
  CHECK(std::abs(std::abs(d.v) - kInvSqrt2) <= kTol);

  // H is the eigenvector of a plate at zero.
  const JonesVector h = apply_hwp(0.0, JonesVector{{1, 0}, {0, 0}});
  CHECK(close(h.h, Complex{1, 0}));
  CHECK(close(h.v, Complex{0, 0}));

  // 45 deg plate swaps H and V.
  const JonesVector v = apply_hwp(M_PI / 4.0, JonesVector{{1, 0}, {0, 0}});
  CHECK(close(v.h, Complex{0, 0}));
  CHECK(close(v.v, Complex{1, 0}));
}

TEST_CASE("hwp rejects non-finite input") {
  CHECK_THROWS_AS(apply_hwp(std::nan(""), JonesVector{{1, 0}, {0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(apply_hwp(0.0, JonesVector{{std::nan(""), 0}, {0, 0}}), std::invalid_argument);
}

TEST_CASE("hwp is unitary for random inputs") {
  polcor::rng::Xoshiro256StarStar gen(11);
  for (int i = 0; i < 1000; ++i) {
    const JonesVector in{{gen.uniform(-2, 2), gen.uniform(-2, 2)},
                         {gen.uniform(-2, 2), gen.uniform(-2, 2)}};
    const double phi = gen.uniform(-M_PI, M_PI);
    const JonesVector out = apply_hwp(phi, in);
    if (in.norm2() > 0) CHECK(std::abs(out.norm2() - in.norm2()) <= kTol * in.norm2());
  }
}

TEST_CASE("pbs splits by axis") {
  const PbsPorts p = apply_pbs(JonesVector{{1, 0}, {0, 0}});
  CHECK(close(p.h_port, Complex{1, 0}));
  CHECK(close(p.v_port, Complex{0, 0}));

  const PbsPorts eq = apply_pbs(JonesVector{{kInvSqrt2, 0}, {kInvSqrt2, 0}});
  CHECK(close(eq.h_port, Complex{kInvSqrt2, 0}));
  CHECK(close(eq.v_port, Complex{kInvSqrt2, 0}));

  // direct arithmetic: |0.6|^2 = 0.36 and |0.8i|^2 = 0.64
  const PbsPorts m = apply_pbs(JonesVector{{0.6, 0}, {0, 0.8}});
  CHECK(std::norm(m.h_port) == doctest::Approx(0.36).epsilon(1e-12));
  CHECK(std::norm(m.v_port) == doctest::Approx(0.64).epsilon(1e-12));
  CHECK(std::norm(m.h_port) + std::norm(m.v_port) ==
        doctest::Approx(JonesVector{{0.6, 0}, {0, 0.8}}.norm2()));
}

TEST_CASE("party field construction") {
  const PhaseSet zero{};
  const TaggedModeField d = make_party_field(Party::Alpha, SourceTag::D, zero, 1.0);
  CHECK(close(d.coef_h, Complex{kInvSqrt2, 0}));
  CHECK(close(d.coef_v, Complex{kInvSqrt2, 0}));
  CHECK(d.intensity() == doctest::Approx(1.0).epsilon(1e-12));

  const TaggedModeField a = make_party_field(Party::Alpha, SourceTag::A, zero, 1.0);
  CHECK(close(a.coef_h, Complex{-kInvSqrt2, 0}));
  CHECK(close(a.coef_v, Complex{kInvSqrt2, 0}));

  // A-class of Bob at eta_beta = pi is the previous one times e^{i pi}.
  const PhaseSet pi_b{0.0, 0.0, M_PI};
  const TaggedModeField b = make_party_field(Party::Beta, SourceTag::A, pi_b, 1.0);
  CHECK(close(b.coef_h, Complex{kInvSqrt2, 0}));
  CHECK(close(b.coef_v, Complex{-kInvSqrt2, 0}));

  CHECK_THROWS_AS(make_party_field(Party::Alpha, SourceTag::D, zero, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_party_field(Party::Alpha, SourceTag::D, zero, -1.0), std::invalid_argument);
}

TEST_CASE("A-class phase covariance") {
  polcor::rng::Xoshiro256StarStar gen(12);
  for (int i = 0; i < 200; ++i) {
    const double eta = gen.uniform(-M_PI, M_PI);
    const double delta = gen.uniform(-M_PI, M_PI);
    const TaggedModeField base = make_party_field(Party::Alpha, SourceTag::A,
                                                  PhaseSet{eta, 0, 0}, 1.0);
    const TaggedModeField shifted = make_party_field(Party::Alpha, SourceTag::A,
                                                     PhaseSet{eta + delta, 0, 0}, 1.0);
    const Complex rot = std::polar(1.0, delta);
    CHECK(close(shifted.coef_h, base.coef_h * rot, 1e-12));
    CHECK(close(shifted.coef_v, base.coef_v * rot, 1e-12));
  }
}

TEST_CASE("analyzer ports") {
  const PhaseSet zero{};
  const double s = kInvSqrt2;
  const TaggedModeField d = make_party_field(Party::Alpha, SourceTag::D, zero, 1.0);

  const AnalyzerPorts axis = analyzer_ports(0.0, d);
  CHECK(close(axis.port1.coef_h, Complex{s, 0}));
  CHECK(close(axis.port1.coef_v, Complex{0, 0}));
  CHECK(close(axis.port2.coef_h, Complex{0, 0}));
  CHECK(close(axis.port2.coef_v, Complex{s, 0}));

  // A-class at 45 degrees: coefficients scale by 1/sqrt(2) per label.
  const PhaseSet eta{0.7, 0, 0};
  const TaggedModeField a = make_party_field(Party::Alpha, SourceTag::A, eta, 1.0);
  const AnalyzerPorts diag = analyzer_ports(M_PI / 4.0, a);
  CHECK(close(diag.port1.coef_h, a.coef_h * std::cos(M_PI / 4.0)));
  CHECK(close(diag.port1.coef_v, a.coef_v * std::sin(M_PI / 4.0)));
}

TEST_CASE("port completeness for random fields and angles") {
  polcor::rng::Xoshiro256StarStar gen(13);
  for (int i = 0; i < 1000; ++i) {
    const PhaseSet phases{gen.uniform(-M_PI, M_PI), gen.uniform(-M_PI, M_PI),
                          gen.uniform(-M_PI, M_PI)};
    const SourceTag tag = gen.uniform01() < 0.5 ? SourceTag::D : SourceTag::A;
    const double i0 = gen.uniform(0.1, 3.0);
    const TaggedModeField f = make_party_field(Party::Beta, tag, phases, i0);
    const AnalyzerPorts p = analyzer_ports(gen.uniform(-M_PI, M_PI), f);
    CHECK(std::abs(p.port1.intensity() + p.port2.intensity() - f.intensity()) <=
          1e-12 * f.intensity());
  }
}

TEST_CASE("phase set derived values") {
  const PhaseSet p{0.4, 1.3, -0.2};
  CHECK(p.eta_alpha() == doctest::Approx(1.7));
  CHECK(p.eta_beta() == doctest::Approx(0.2));
  CHECK(p.eta_ab() == doctest::Approx(1.9));
  CHECK(p.eta_party(Party::Alpha) == p.eta_alpha());
  CHECK(p.eta_party(Party::Beta) == p.eta_beta());
}
