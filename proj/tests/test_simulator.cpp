#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "polcor/rng.hpp"
#include "polcor/simulator.hpp"

using namespace polcor::sim;
using polcor::optics::AnalyzerPorts;
using polcor::optics::Complex;
using polcor::optics::Party;
using polcor::optics::PhaseSet;
using polcor::optics::SourceTag;
using polcor::optics::TaggedModeField;

namespace {

double a_fraction(const std::vector<PulseBin>& schedule) {
  std::size_t n_a = 0;
  for (const PulseBin& b : schedule) n_a += b.tag == SourceTag::A ? 1 : 0;
  return static_cast<double>(n_a) / static_cast<double>(schedule.size());
}

bool same_sample(const DetectorSample& a, const DetectorSample& b) {
  return a.bin == b.bin && a.party == b.party && a.tag == b.tag &&
         a.port1_coef_h == b.port1_coef_h && a.port1_coef_v == b.port1_coef_v &&
         a.port2_coef_h == b.port2_coef_h && a.port2_coef_v == b.port2_coef_v &&
         a.intensity_port1 == b.intensity_port1 && a.intensity_port2 == b.intensity_port2;
}

}  // namespace

TEST_CASE("schedule statistics") {
  const auto half = gen_schedule(100000, 0.5, 42);
  CHECK(std::abs(a_fraction(half) - 0.5) <= 0.01);

  const auto quarter = gen_schedule(10000, 0.25, 7);
  CHECK(std::abs(a_fraction(quarter) - 0.25) <= 0.02);

  const auto single = gen_schedule(1, 0.5, 99);
  REQUIRE(single.size() == 1);
  CHECK(single[0].index == 0);
}

TEST_CASE("schedule is dense, deterministic and seed-sensitive") {
  const auto s1 = gen_schedule(5000, 0.5, 1234);
  const auto s2 = gen_schedule(5000, 0.5, 1234);
  const auto s3 = gen_schedule(5000, 0.5, 1235);
  REQUIRE(s1.size() == s2.size());
  bool identical = true, differs = false;
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK(s1[i].index == i);
    identical = identical && s1[i].tag == s2[i].tag;
    differs = differs || s1[i].tag != s3[i].tag;
  }
  CHECK(identical);
  CHECK(differs);
}

TEST_CASE("schedule validates duty") {
  CHECK_THROWS_AS(gen_schedule(10, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_schedule(10, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_schedule(10, 1.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_schedule(0, 0.5, 1), std::invalid_argument);
}

TEST_CASE("pinned schedule head for the documented generator") {
  // xoshiro256** seeded via splitmix64, uniform01 < duty -> A; seed 42.
  const auto s = gen_schedule(8, 0.5, 42);
  const SourceTag expect[8] = {SourceTag::A, SourceTag::A, SourceTag::D, SourceTag::D,
                               SourceTag::D, SourceTag::D, SourceTag::D, SourceTag::D};
  for (int i = 0; i < 8; ++i) CHECK(s[i].tag == expect[i]);
}

TEST_CASE("propagation: hand-evaluated D bin at theta = 0") {
  OpticalConfig cfg;
  cfg.theta = 0.0;
  cfg.i0 = 1.0;
  const BinOutputs out = propagate_bin(PulseBin{0, SourceTag::D}, cfg);
  // analyzer on (sqrt(1/2), sqrt(1/2)) at angle 0: port1 = (s, 0)
  CHECK(out.alice.intensity_port1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out.alice.intensity_port2 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(out.alice.port1_coef_h - Complex{std::sqrt(0.5), 0}) <= 1e-12);
  CHECK(std::abs(out.alice.port1_coef_v) <= 1e-12);
}

TEST_CASE("propagation conserves energy per bin in separated mode") {
  polcor::rng::Xoshiro256StarStar gen(31);
  for (int i = 0; i < 200; ++i) {
    OpticalConfig cfg;
    cfg.theta = gen.uniform(-M_PI, M_PI);
    cfg.xi = gen.uniform(-M_PI, M_PI);
    cfg.psi_a = gen.uniform(-M_PI, M_PI);
    cfg.psi_b = gen.uniform(-M_PI, M_PI);
    cfg.eta = gen.uniform(-M_PI, M_PI);
    cfg.i0 = gen.uniform(0.2, 3.0);
    const SourceTag tag = gen.uniform01() < 0.5 ? SourceTag::D : SourceTag::A;
    const BinOutputs out = propagate_bin(PulseBin{0, tag}, cfg);
    CHECK(std::abs(out.alice.full_field() - cfg.i0) <= 1e-12 * cfg.i0);
    CHECK(std::abs(out.bob.full_field() - cfg.i0) <= 1e-12 * cfg.i0);
  }
}

TEST_CASE("path phase moves coefficients, not intensities") {
  OpticalConfig base;
  base.theta = 0.6;
  OpticalConfig shifted = base;
  shifted.psi_a = M_PI;
  const DetectorSample s0 = propagate_bin(PulseBin{0, SourceTag::A}, base).alice;
  const DetectorSample s1 = propagate_bin(PulseBin{0, SourceTag::A}, shifted).alice;
  CHECK(s0.intensity_port1 == doctest::Approx(s1.intensity_port1).epsilon(1e-12));
  CHECK(s0.intensity_port2 == doctest::Approx(s1.intensity_port2).epsilon(1e-12));
  const Complex rot = std::polar(1.0, M_PI);
  CHECK(std::abs(s1.port1_coef_h - s0.port1_coef_h * rot) <= 1e-12);
  CHECK(std::abs(s1.port1_coef_v - s0.port1_coef_v * rot) <= 1e-12);
}

TEST_CASE("simulate equals per-bin propagation bit for bit") {
  OpticalConfig cfg;
  cfg.theta = 0.3;
  cfg.xi = -0.8;
  cfg.psi_a = 0.25;
  cfg.eta = 1.1;
  cfg.n_bins = 500;
  cfg.seed = 5;
  const SimulationRun run = simulate(cfg);
  REQUIRE(run.alice.size() == cfg.n_bins);
  for (std::size_t i = 0; i < run.schedule.size(); ++i) {
    const BinOutputs out = propagate_bin(run.schedule[i], cfg);
    CHECK(same_sample(out.alice, run.alice[i]));
    CHECK(same_sample(out.bob, run.bob[i]));
  }
}

TEST_CASE("coherent fringe formula") {
  // flat at theta = pi/4
  for (double eta : {0.0, 0.5, 2.0, M_PI})
    CHECK(coherent_bin_intensity(M_PI / 4.0, eta, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  // full-visibility fringe at theta = 0
  CHECK(coherent_bin_intensity(0.0, 0.0, 1.0) == doctest::Approx(0.0));
  CHECK(coherent_bin_intensity(0.0, M_PI, 1.0) == doctest::Approx(2.0));
  CHECK(coherent_bin_intensity(0.0, M_PI / 2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(coherent_bin_intensity(0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("coherent fringe formula matches the direct field sum") {
  using namespace polcor::optics;
  polcor::rng::Xoshiro256StarStar gen(32);
  for (int i = 0; i < 300; ++i) {
    const double theta = gen.uniform(-M_PI, M_PI);
    const double eta = gen.uniform(-2 * M_PI, 2 * M_PI);
    const double i0 = gen.uniform(0.2, 3.0);
    // oracle: sum the D and A amplitudes, then read port 1 of the analyzer
    const PhaseSet phases{eta, 0, 0};
    const TaggedModeField d = make_party_field(Party::Alpha, SourceTag::D, phases, i0);
    const TaggedModeField a = make_party_field(Party::Alpha, SourceTag::A, phases, i0);
    const TaggedModeField sum{Party::Alpha, SourceTag::D, d.coef_h + a.coef_h,
                              d.coef_v + a.coef_v};
    const double direct = analyzer_ports(theta, sum).port1.intensity();
    CHECK(std::abs(direct - coherent_bin_intensity(theta, eta, i0)) <= 1e-12 * (1.0 + i0));
  }
}

TEST_CASE("coherent-mode propagation carries the fringe on port 1") {
  OpticalConfig cfg;
  cfg.overlap = OverlapMode::Coherent;
  cfg.theta = 0.3;
  cfg.eta = 1.2;
  const BinOutputs out = propagate_bin(PulseBin{0, SourceTag::D}, cfg);
  CHECK(out.alice.intensity_port1 ==
        doctest::Approx(coherent_bin_intensity(0.3, 1.2, 1.0)).epsilon(1e-12));
  // both pulses share the bin, so the full field carries 2 i0
  CHECK(out.alice.full_field() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("local randomness: port means ignore the phase settings") {
  OpticalConfig cfg;
  cfg.theta = 0.9;
  cfg.n_bins = 10000;
  cfg.seed = 8;
  double first_p1 = 0, first_p2 = 0;
  for (int i = 0; i < 16; ++i) {
    cfg.psi_a = 2 * M_PI * i / 16.0;
    const SimulationRun run = simulate(cfg);
    double p1 = 0, p2 = 0;
    for (const DetectorSample& s : run.alice) {
      p1 += s.intensity_port1;
      p2 += s.intensity_port2;
    }
    p1 /= static_cast<double>(run.alice.size());
    p2 /= static_cast<double>(run.alice.size());
    if (i == 0) {
      first_p1 = p1;
      first_p2 = p2;
    } else {
      CHECK(std::abs(p1 - first_p1) <= 1e-12);
      CHECK(std::abs(p2 - first_p2) <= 1e-12);
    }
  }
}

TEST_CASE("config validation") {
  OpticalConfig cfg;
  cfg.duty = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.duty = 0.5;
  cfg.n_bins = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.n_bins = 10;
  cfg.theta = std::nan("");
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
