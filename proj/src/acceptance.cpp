#include "polcor/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include "polcor/config_io.hpp"
#include "polcor/harness.hpp"
#include "polcor/rng.hpp"

namespace polcor::acceptance {

using algebra::DetectorPair;
using algebra::PairFamily;
using meas::BellLabel;
using optics::Party;
using optics::PhaseSet;
using sim::OpticalConfig;
using sim::OverlapMode;

namespace {

constexpr double kPi = M_PI;
constexpr double kAnalyticTol = 1e-12;
// Closed-form exactness makes most estimator spreads degenerate, so every
// "within k sigma" bound carries a small absolute floor.
constexpr double kStatFloor = 1e-9;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

OpticalConfig base_config(std::uint64_t n_bins, std::uint64_t seed) {
  OpticalConfig cfg;
  cfg.n_bins = n_bins;
  cfg.seed = seed;
  return cfg;
}

double mc_estimate(const OpticalConfig& cfg, DetectorPair pair, double* std_err) {
  const sim::SimulationRun run = sim::simulate(cfg);
  const meas::BinPairing pairing = meas::pair_bins(run.schedule);
  const meas::PairCorrelation pc = meas::estimate_R(pairing, run.alice, run.bob, pair, cfg);
  if (std_err != nullptr) *std_err = pc.std_err;
  return pc.estimate;
}

// 1. Even endpoint of the joint correlation: R_AB = I0^2 cos^2(theta - xi).
Check criterion_even_endpoint() {
  Check c;
  rng::Xoshiro256StarStar gen(0xACCE01);
  for (int i = 0; i < 100 && c.ok; ++i) {
    const double theta = gen.uniform(-kPi, kPi);
    const double xi = gen.uniform(-kPi, kPi);
    const double expected = std::pow(std::cos(theta - xi), 2);
    const double closed = algebra::closed_form_R(DetectorPair::AB, theta, xi, 0.0, 1.0);
    c.require(std::abs(closed - expected) <= kAnalyticTol,
              "closed form off at theta=" + std::to_string(theta) + " xi=" + std::to_string(xi));
    OpticalConfig cfg = base_config(100000, 7000 + i);
    cfg.theta = theta;
    cfg.xi = xi;
    double se = 0;
    const double est = mc_estimate(cfg, DetectorPair::AB, &se);
    c.require(std::abs(est - closed) <= 4.0 * se + kStatFloor,
              "MC estimate outside 4 sigma at theta=" + std::to_string(theta));
  }
  return c;
}

// 2. Odd endpoint: R_AB = I0^2 sin^2(theta + xi) at eta_ab = pi, plus the
// cross-port forms sin^2(theta - xi) / cos^2(theta + xi).
Check criterion_odd_endpoint() {
  Check c;
  rng::Xoshiro256StarStar gen(0xACCE02);
  for (int i = 0; i < 100 && c.ok; ++i) {
    const double theta = gen.uniform(-kPi, kPi);
    const double xi = gen.uniform(-kPi, kPi);
    const double ab_odd = algebra::closed_form_R(DetectorPair::AB, theta, xi, kPi, 1.0);
    c.require(std::abs(ab_odd - std::pow(std::sin(theta + xi), 2)) <= kAnalyticTol,
              "AB odd-pi form off");
    const double ad_even = algebra::closed_form_R(DetectorPair::AD, theta, xi, 0.0, 1.0);
    const double bc_even = algebra::closed_form_R(DetectorPair::BC, theta, xi, 0.0, 1.0);
    c.require(std::abs(ad_even - std::pow(std::sin(theta - xi), 2)) <= kAnalyticTol,
              "AD even form off");
    c.require(std::abs(bc_even - std::pow(std::sin(theta - xi), 2)) <= kAnalyticTol,
              "BC even form off");
    const double ad_odd = algebra::closed_form_R(DetectorPair::AD, theta, xi, kPi, 1.0);
    const double bc_odd = algebra::closed_form_R(DetectorPair::BC, theta, xi, kPi, 1.0);
    c.require(std::abs(ad_odd - std::pow(std::cos(theta + xi), 2)) <= kAnalyticTol,
              "AD odd-pi form off");
    c.require(std::abs(bc_odd - std::pow(std::cos(theta + xi), 2)) <= kAnalyticTol,
              "BC odd-pi form off");
  }
  for (int i = 0; i < 25 && c.ok; ++i) {
    OpticalConfig cfg = base_config(100000, 7100 + i);
    cfg.theta = gen.uniform(-kPi, kPi);
    cfg.xi = gen.uniform(-kPi, kPi);
    for (double eta_ab : {0.0, kPi}) {
      cfg.psi_a = eta_ab;  // eta_ab = 2 eta + psi_a + psi_b
      const sim::SimulationRun run = sim::simulate(cfg);
      const meas::BinPairing pairing = meas::pair_bins(run.schedule);
      for (DetectorPair pair : {DetectorPair::AB, DetectorPair::AD, DetectorPair::BC}) {
        const meas::PairCorrelation pc =
            meas::estimate_R(pairing, run.alice, run.bob, pair, cfg);
        c.require(std::abs(pc.estimate - pc.closed_form) <= 4.0 * pc.std_err + kStatFloor,
                  std::string("MC off for ") + to_string(pair) + " at eta_ab=" +
                      std::to_string(eta_ab));
      }
    }
  }
  return c;
}

// 3. Local randomness: full field is I0 per bin; phase sweeps leave the
// per-port means unchanged.
Check criterion_local_randomness() {
  Check c;
  OpticalConfig cfg = base_config(100000, 31);
  cfg.theta = 0.37;
  cfg.xi = -0.92;
  cfg.i0 = 1.5;
  const sim::SimulationRun run = sim::simulate(cfg);
  for (const auto* stream : {&run.alice, &run.bob}) {
    for (const sim::DetectorSample& s : *stream) {
      c.require(std::abs(s.full_field() - cfg.i0) <= kAnalyticTol, "per-bin full field != i0");
      if (!c.ok) return c;
    }
  }

  for (const std::string param : {"psi_a", "psi_b", "eta"}) {
    double p1_min = 1e300, p1_max = -1e300, p2_min = 1e300, p2_max = -1e300, se_max = 0;
    for (int i = 0; i < 16; ++i) {
      const OpticalConfig swept =
          cli::with_param(cfg, param, 2.0 * kPi * static_cast<double>(i) / 16.0);
      const meas::LocalStats ls = meas::local_stats(sim::simulate(swept).alice);
      p1_min = std::min(p1_min, ls.port1_mean);
      p1_max = std::max(p1_max, ls.port1_mean);
      p2_min = std::min(p2_min, ls.port2_mean);
      p2_max = std::max(p2_max, ls.port2_mean);
      se_max = std::max({se_max, ls.port1_std_err, ls.port2_std_err});
    }
    c.require(p1_max - p1_min <= 3.0 * se_max + kAnalyticTol,
              "port-1 mean varies across " + param + " sweep");
    c.require(p2_max - p2_min <= 3.0 * se_max + kAnalyticTol,
              "port-2 mean varies across " + param + " sweep");
  }
  return c;
}

// 4. Completeness: R_AB + R_AD = R_CD + R_BC = I0^2.
Check criterion_completeness() {
  Check c;
  for (int it = 0; it < 20 && c.ok; ++it)
    for (int ix = 0; ix < 20 && c.ok; ++ix)
      for (int ie = 0; ie < 20 && c.ok; ++ie) {
        const double theta = 2.0 * kPi * it / 20.0;
        const double xi = 2.0 * kPi * ix / 20.0;
        const double eta_ab = 2.0 * kPi * ie / 20.0;
        const double sum_a = algebra::closed_form_R(DetectorPair::AB, theta, xi, eta_ab, 1.0) +
                             algebra::closed_form_R(DetectorPair::AD, theta, xi, eta_ab, 1.0);
        const double sum_b = algebra::closed_form_R(DetectorPair::CD, theta, xi, eta_ab, 1.0) +
                             algebra::closed_form_R(DetectorPair::BC, theta, xi, eta_ab, 1.0);
        c.require(std::abs(sum_a - 1.0) <= kAnalyticTol, "AB+AD != I0^2 on grid");
        c.require(std::abs(sum_b - 1.0) <= kAnalyticTol, "CD+BC != I0^2 on grid");
      }

  rng::Xoshiro256StarStar gen(0xACCE04);
  for (int i = 0; i < 10 && c.ok; ++i) {
    OpticalConfig cfg = base_config(100000, 7400 + i);
    cfg.theta = gen.uniform(-kPi, kPi);
    cfg.xi = gen.uniform(-kPi, kPi);
    cfg.psi_a = gen.uniform(-kPi, kPi);
    cfg.psi_b = gen.uniform(-kPi, kPi);
    cfg.eta = gen.uniform(-kPi, kPi);
    cfg.i0 = gen.uniform(0.5, 2.0);
    const auto pairs = meas::estimate_all_pairs(sim::simulate(cfg));
    const double i0sq = cfg.i0 * cfg.i0;
    const auto stat_tol = [&](int a, int b) {
      return 4.0 * (pairs[a].std_err + pairs[b].std_err) + kStatFloor * i0sq;
    };
    c.require(std::abs(pairs[0].estimate + pairs[2].estimate - i0sq) <= stat_tol(0, 2),
              "MC AB+AD != I0^2");
    c.require(std::abs(pairs[1].estimate + pairs[3].estimate - i0sq) <= stat_tol(1, 3),
              "MC CD+BC != I0^2");
  }
  return c;
}

// 5. Symbolic expansion/reduction reproduces the (1 +- e^{i eta_ab}) class
// coefficients.
Check criterion_symbolic_fidelity() {
  Check c;
  rng::Xoshiro256StarStar gen(0xACCE05);
  for (int i = 0; i < 1000 && c.ok; ++i) {
    const double theta = gen.uniform(-kPi, kPi);
    const double xi = gen.uniform(-kPi, kPi);
    const double eta = gen.uniform(-kPi, kPi);
    const double psi_a = gen.uniform(-kPi, kPi);
    const double psi_b = gen.uniform(-kPi, kPi);
    const double i0 = gen.uniform(0.5, 3.0);
    const PhaseSet phases{eta, psi_a, psi_b};
    const double eta_ab = phases.eta_ab();

    const auto terms = algebra::expand_joint(optics::make_party_fields(Party::Alpha, phases, i0),
                                             optics::make_party_fields(Party::Beta, phases, i0),
                                             theta, xi);
    const algebra::ReducedJoint joint = algebra::reduce(terms);
    const std::complex<double> phase = std::polar(1.0, eta_ab);
    const std::complex<double> sp_expected = std::cos(theta - xi) * (1.0 + phase);
    const std::complex<double> cp_expected = std::sin(theta + xi) * (1.0 - phase);
    c.require(std::abs(joint.same_pol - sp_expected) <= kAnalyticTol, "same-pol coefficient off");
    c.require(std::abs(joint.cross_pol - cp_expected) <= kAnalyticTol, "cross-pol coefficient off");
    const double closed = algebra::closed_form_R(DetectorPair::AB, theta, xi, eta_ab, i0);
    c.require(std::abs(i0 * i0 * joint.value() - closed) <= kAnalyticTol * i0 * i0,
              "reduced value differs from closed form");
  }
  return c;
}

// 6. CHSH at the canonical settings.
Check criterion_chsh() {
  Check c;
  const double a = 0.0, ap = kPi / 4.0, b = kPi / 8.0, bp = 3.0 * kPi / 8.0;
  const meas::ChshResult closed = meas::chsh_closed_form(a, ap, b, bp, 0.0, 1.0);
  c.require(std::abs(closed.s_value - 2.0 * std::sqrt(2.0)) <= kAnalyticTol,
            "closed-form S != 2 sqrt 2");
  const meas::ChshResult mc = meas::chsh_mc(base_config(100000, 61), a, ap, b, bp);
  c.require(mc.s_value >= 2.78 && mc.s_value <= 2.88,
            "MC S outside [2.78, 2.88]: " + std::to_string(mc.s_value));
  return c;
}

// 7. Quantum-eraser contrast: coherent overlap restores a |cos 2 theta|
// fringe; temporal separation flattens it.
Check criterion_eraser_contrast() {
  Check c;
  for (double theta : {0.0, kPi / 8.0, kPi / 4.0}) {
    for (OverlapMode mode : {OverlapMode::Coherent, OverlapMode::Separated}) {
      double i_min = 1e300, i_max = -1e300;
      for (int k = 0; k < 64; ++k) {
        OpticalConfig cfg = base_config(100000, 77);
        cfg.theta = theta;
        cfg.eta = 2.0 * kPi * k / 64.0;
        cfg.overlap = mode;
        const meas::LocalStats ls = meas::local_stats(sim::simulate(cfg).alice);
        i_min = std::min(i_min, ls.port1_mean);
        i_max = std::max(i_max, ls.port1_mean);
      }
      const double visibility = (i_max - i_min) / (i_max + i_min);
      if (mode == OverlapMode::Coherent)
        c.require(std::abs(visibility - std::abs(std::cos(2.0 * theta))) <= 0.02,
                  "coherent visibility != |cos 2 theta| at theta=" + std::to_string(theta));
      else
        c.require(visibility < 0.01,
                  "separated-mode fringe visible at theta=" + std::to_string(theta));
    }
  }
  return c;
}

// 8. Bell-state labels for the two fringe families at the two endpoints.
Check criterion_bell_labels() {
  Check c;
  const auto fam = [](DetectorPair p) { return algebra::pair_family(p); };
  for (DetectorPair p : {DetectorPair::AB, DetectorPair::CD}) {
    c.require(meas::classify_bell_state(0.0, fam(p)) == BellLabel::PhiPlus, "same-port even label");
    c.require(meas::classify_bell_state(kPi, fam(p)) == BellLabel::PsiPlus, "same-port odd label");
  }
  for (DetectorPair p : {DetectorPair::AD, DetectorPair::BC}) {
    c.require(meas::classify_bell_state(0.0, fam(p)) == BellLabel::PsiMinus,
              "cross-port even label");
    c.require(meas::classify_bell_state(kPi, fam(p)) == BellLabel::PhiMinus,
              "cross-port odd label");
  }
  c.require(meas::classify_bell_state(4.0 * kPi, PairFamily::SamePort) == BellLabel::PhiPlus,
            "2n pi periodicity");
  c.require(meas::classify_bell_state(-kPi, PairFamily::CrossPort) == BellLabel::PhiMinus,
            "negative odd endpoint");
  return c;
}

// 9. Loopback Alice/Bob/correlator run equals the in-process pipeline byte
// for byte.
Check criterion_distributed_equivalence() {
  Check c;
  rng::Xoshiro256StarStar gen(0xACCE09);
  for (int i = 0; i < 5 && c.ok; ++i) {
    OpticalConfig cfg = base_config(10000, 9000 + i);
    cfg.theta = gen.uniform(-kPi, kPi);
    cfg.xi = gen.uniform(-kPi, kPi);
    cfg.psi_a = gen.uniform(-kPi, kPi);
    cfg.psi_b = gen.uniform(-kPi, kPi);
    cfg.eta = gen.uniform(-kPi, kPi);
    cfg.duty = gen.uniform(0.3, 0.7);
    cfg.i0 = gen.uniform(0.5, 2.0);

    const harness::CorrelatorResult local = harness::run_in_process(cfg, harness::all_pairs());

    harness::Listener listener("127.0.0.1", 0);
    const std::uint16_t port = listener.port();
    std::thread alice([&cfg, port] {
      harness::Socket s = harness::connect("127.0.0.1", port);
      harness::run_party(Party::Alpha, cfg, s);
    });
    std::thread bob([&cfg, port] {
      harness::Socket s = harness::connect("127.0.0.1", port);
      harness::run_party(Party::Beta, cfg, s);
    });
    harness::CorrelatorResult networked;
    std::string failure;
    try {
      harness::Socket first = listener.accept();
      harness::Socket second = listener.accept();
      networked = harness::run_correlator(first, second, cfg, harness::all_pairs());
    } catch (const std::exception& e) {
      failure = e.what();
    }
    alice.join();
    bob.join();
    c.require(failure.empty(), "networked run failed: " + failure);
    c.require(networked.csv == local.csv, "networked CSV differs from in-process CSV");
  }
  return c;
}

// 10. Byte-identical reruns.
Check criterion_determinism() {
  Check c;
  OpticalConfig cfg = base_config(100000, 202);
  cfg.theta = 0.6;
  cfg.xi = -0.25;
  cfg.psi_a = 1.1;
  cfg.psi_b = -0.4;
  cfg.eta = 0.3;

  const sim::SimulationRun r1 = sim::simulate(cfg);
  const sim::SimulationRun r2 = sim::simulate(cfg);
  c.require(wire::encode_stream(cfg, Party::Alpha, r1.alice) ==
                wire::encode_stream(cfg, Party::Alpha, r2.alice),
            "alice streams differ between runs");
  c.require(wire::encode_stream(cfg, Party::Beta, r1.bob) ==
                wire::encode_stream(cfg, Party::Beta, r2.bob),
            "bob streams differ between runs");
  c.require(harness::run_in_process(cfg, harness::all_pairs()).csv ==
                harness::run_in_process(cfg, harness::all_pairs()).csv,
            "CSVs differ between runs");
  return c;
}

struct Criterion {
  int number;
  const char* name;
  std::function<Check()> run;
  double time_limit_s;  // 0 = no limit
};

}  // namespace

std::vector<CriterionResult> run_all(std::ostream& log) {
  const Criterion criteria[] = {
      {1, "even-endpoint cos^2(theta-xi)", criterion_even_endpoint, 10.0},
      {2, "odd-endpoint sin^2 / cross-port forms", criterion_odd_endpoint, 0.0},
      {3, "local randomness", criterion_local_randomness, 0.0},
      {4, "completeness R_AB+R_AD = I0^2", criterion_completeness, 0.0},
      {5, "symbolic fidelity", criterion_symbolic_fidelity, 0.0},
      {6, "CHSH S = 2 sqrt 2", criterion_chsh, 30.0},
      {7, "eraser-violation contrast", criterion_eraser_contrast, 0.0},
      {8, "bell-state labels", criterion_bell_labels, 0.0},
      {9, "distributed equivalence", criterion_distributed_equivalence, 20.0},
      {10, "determinism", criterion_determinism, 0.0},
  };

  std::vector<CriterionResult> results;
  for (const Criterion& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Check check;
    try {
      check = cr.run();
    } catch (const std::exception& e) {
      check.ok = false;
      check.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (check.ok && cr.time_limit_s > 0.0 && secs > cr.time_limit_s) {
      check.ok = false;
      check.detail = "runtime limit exceeded";
    }
    std::ostringstream line;
    line << (check.ok ? "PASS" : "FAIL") << "  " << cr.number << "  " << cr.name;
    line.setf(std::ios::fixed);
    line.precision(2);
    line << "  (" << secs << " s)";
    if (!check.ok) line << "  -- " << check.detail;
    log << line.str() << "\n" << std::flush;
    results.push_back(CriterionResult{cr.number, cr.name, check.ok, check.detail, secs});
  }
  return results;
}

int run_cli(std::ostream& log) {
  const auto results = run_all(log);
  int failed = 0;
  for (const CriterionResult& r : results) failed += r.passed ? 0 : 1;
  if (failed == 0)
    log << "all " << results.size() << " acceptance criteria passed\n";
  else
    log << failed << " of " << results.size() << " acceptance criteria FAILED\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace polcor::acceptance
