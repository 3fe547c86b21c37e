#include "polcor/measurement.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace polcor::meas {

using algebra::closed_form_R;
using optics::Complex;
using optics::SourceTag;

namespace {

// Welford accumulator: ordered, deterministic, and exactly zero variance for
// constant input.
struct Accumulator {
  double mean_ = 0, m2_ = 0;
  std::uint64_t n = 0;

  void add(double x) {
    ++n;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n);
    m2_ += delta * (x - mean_);
  }
  double mean() const { return mean_; }
  double std_err() const {
    if (n < 2) return 0.0;
    const double var = m2_ / static_cast<double>(n - 1);
    return std::sqrt(var / static_cast<double>(n));
  }
};

}  // namespace

LocalStats local_stats(std::span<const DetectorSample> stream) {
  if (stream.empty()) throw std::invalid_argument("local_stats: empty stream");
  const Party party = stream.front().party;
  Accumulator p1, p2, full;
  for (const DetectorSample& s : stream) {
    if (s.party != party) throw std::invalid_argument("local_stats: mixed-party stream");
    p1.add(s.intensity_port1);
    p2.add(s.intensity_port2);
    full.add(s.full_field());
  }
  LocalStats out;
  out.party = party;
  out.n = stream.size();
  out.port1_mean = p1.mean();
  out.port1_std_err = p1.std_err();
  out.port2_mean = p2.mean();
  out.port2_std_err = p2.std_err();
  out.full_field_mean = full.mean();
  out.full_field_std_err = full.std_err();
  return out;
}

BinPairing pair_bins(std::span<const PulseBin> schedule) {
  std::uint64_t n_d = 0, n_a = 0;
  for (const PulseBin& b : schedule) (b.tag == SourceTag::D ? n_d : n_a)++;
  if (n_d < 1 || n_a < 1)
    throw std::invalid_argument("pair_bins: schedule needs at least one D and one A bin");

  BinPairing out;
  out.n_bins = schedule.size();
  std::deque<std::uint64_t> waiting_d;
  for (const PulseBin& b : schedule) {
    if (b.tag == SourceTag::D) {
      waiting_d.push_back(b.index);
    } else if (!waiting_d.empty()) {
      out.pairs.emplace_back(waiting_d.front(), b.index);
      waiting_d.pop_front();
    }
  }
  out.discarded = out.n_bins - 2 * out.pairs.size();
  out.discarded_fraction =
      static_cast<double>(out.discarded) / static_cast<double>(out.n_bins);
  return out;
}

namespace {

struct PortCoefs {
  Complex h, v;
};

PortCoefs selected_port(const DetectorSample& s, int port) {
  return port == 1 ? PortCoefs{s.port1_coef_h, s.port1_coef_v}
                   : PortCoefs{s.port2_coef_h, s.port2_coef_v};
}

// Alice port, Bob port for each detector pair (A,C = Alice ports 1,2;
// B,D = Bob ports 1,2).
void pair_ports(DetectorPair pair, int& alice_port, int& bob_port) {
  switch (pair) {
    case DetectorPair::AB: alice_port = 1; bob_port = 1; break;
    case DetectorPair::CD: alice_port = 2; bob_port = 2; break;
    case DetectorPair::AD: alice_port = 1; bob_port = 2; break;
    default: alice_port = 2; bob_port = 1; break;
  }
}

}  // namespace

PairCorrelation estimate_R(const BinPairing& pairing, std::span<const DetectorSample> alice,
                           std::span<const DetectorSample> bob, DetectorPair pair,
                           const OpticalConfig& cfg) {
  if (cfg.overlap == sim::OverlapMode::Coherent)
    throw std::invalid_argument("estimate_R: selective measurement undefined for coherent streams");
  if (pairing.pairs.empty()) throw std::invalid_argument("estimate_R: no paired bins");
  if (alice.size() != bob.size())
    throw std::invalid_argument("estimate_R: party streams differ in length");

  int ap = 0, bp = 0;
  pair_ports(pair, ap, bp);
  const double i0 = cfg.i0;
  const double per_label = i0 / 2.0;  // product of the two parties' label amplitudes

  Accumulator acc;
  for (const auto& [d_bin, a_bin] : pairing.pairs) {
    if (d_bin >= alice.size() || a_bin >= alice.size() || alice[d_bin].bin != d_bin ||
        alice[a_bin].bin != a_bin)
      throw std::invalid_argument("estimate_R: stream is not dense bin-ordered");
    const PortCoefs da = selected_port(alice[d_bin], ap);
    const PortCoefs db = selected_port(bob[d_bin], bp);
    const PortCoefs aa = selected_port(alice[a_bin], ap);
    const PortCoefs ab = selected_port(bob[a_bin], bp);

    using algebra::BasisClass;
    using algebra::Mode;
    using algebra::ProductTerm;
    using algebra::SourcePair;
    const ProductTerm terms[8] = {
        {Mode::H, Mode::H, SourcePair::DD, BasisClass::SamePol, da.h * db.h / per_label},
        {Mode::V, Mode::V, SourcePair::DD, BasisClass::SamePol, da.v * db.v / per_label},
        {Mode::H, Mode::V, SourcePair::DD, BasisClass::CrossPol, da.h * db.v / per_label},
        {Mode::V, Mode::H, SourcePair::DD, BasisClass::CrossPol, da.v * db.h / per_label},
        {Mode::H, Mode::H, SourcePair::AA, BasisClass::SamePol, aa.h * ab.h / per_label},
        {Mode::V, Mode::V, SourcePair::AA, BasisClass::SamePol, aa.v * ab.v / per_label},
        {Mode::H, Mode::V, SourcePair::AA, BasisClass::CrossPol, aa.h * ab.v / per_label},
        {Mode::V, Mode::H, SourcePair::AA, BasisClass::CrossPol, aa.v * ab.h / per_label},
    };
    const algebra::ReducedJoint joint = algebra::reduce(terms);
    acc.add(i0 * i0 * joint.value());
  }

  PairCorrelation out;
  out.pair = pair;
  out.estimate = acc.mean();
  out.std_err = acc.std_err();
  out.n_pairs = pairing.pairs.size();
  out.discarded_fraction = pairing.discarded_fraction;
  out.closed_form = closed_form_R(pair, cfg.theta, cfg.xi, cfg.phases().eta_ab(), i0);
  return out;
}

std::array<PairCorrelation, 4> estimate_all_pairs(const sim::SimulationRun& run) {
  const BinPairing pairing = pair_bins(run.schedule);
  std::array<PairCorrelation, 4> out;
  int i = 0;
  for (DetectorPair pair :
       {DetectorPair::AB, DetectorPair::CD, DetectorPair::AD, DetectorPair::BC})
    out[i++] = estimate_R(pairing, run.alice, run.bob, pair, run.cfg);
  return out;
}

double correlation_E(double r_ab, double r_cd, double r_ad, double r_bc) {
  const double denom = r_ab + r_cd + r_ad + r_bc;
  if (denom == 0.0) throw std::domain_error("correlation_E: zero total correlation");
  return (r_ab + r_cd - r_ad - r_bc) / denom;
}

double correlation_E(const std::array<PairCorrelation, 4>& pairs) {
  double r[4] = {0, 0, 0, 0};
  for (const PairCorrelation& pc : pairs) r[static_cast<int>(pc.pair)] = pc.estimate;
  return correlation_E(r[0], r[1], r[2], r[3]);
}

double correlation_E_closed(double theta, double xi, double eta_ab, double i0) {
  return correlation_E(closed_form_R(DetectorPair::AB, theta, xi, eta_ab, i0),
                       closed_form_R(DetectorPair::CD, theta, xi, eta_ab, i0),
                       closed_form_R(DetectorPair::AD, theta, xi, eta_ab, i0),
                       closed_form_R(DetectorPair::BC, theta, xi, eta_ab, i0));
}

ChshResult chsh_closed_form(double a, double a_prime, double b, double b_prime, double eta_ab,
                            double i0) {
  ChshResult r{a, a_prime, b, b_prime, 0, 0, 0, 0, 0};
  r.e_ab = correlation_E_closed(a, b, eta_ab, i0);
  r.e_ab_prime = correlation_E_closed(a, b_prime, eta_ab, i0);
  r.e_aprime_b = correlation_E_closed(a_prime, b, eta_ab, i0);
  r.e_aprime_bprime = correlation_E_closed(a_prime, b_prime, eta_ab, i0);
  r.s_value = r.e_ab - r.e_ab_prime + r.e_aprime_b + r.e_aprime_bprime;
  return r;
}

ChshResult chsh_mc(const OpticalConfig& base, double a, double a_prime, double b,
                   double b_prime) {
  const auto estimate_E = [&base](double theta, double xi) {
    OpticalConfig cfg = base;
    cfg.theta = theta;
    cfg.xi = xi;
    return correlation_E(estimate_all_pairs(sim::simulate(cfg)));
  };
  ChshResult r{a, a_prime, b, b_prime, 0, 0, 0, 0, 0};
  r.e_ab = estimate_E(a, b);
  r.e_ab_prime = estimate_E(a, b_prime);
  r.e_aprime_b = estimate_E(a_prime, b);
  r.e_aprime_bprime = estimate_E(a_prime, b_prime);
  r.s_value = r.e_ab - r.e_ab_prime + r.e_aprime_b + r.e_aprime_bprime;
  return r;
}

BellLabel classify_bell_state(double eta_ab, PairFamily family, double tol) {
  const double two_pi = 2.0 * M_PI;
  double rem = std::remainder(eta_ab, two_pi);  // in [-pi, pi]
  const bool even = std::abs(rem) <= tol;
  const bool odd = std::abs(std::abs(rem) - M_PI) <= tol;
  if (!even && !odd)
    throw std::domain_error("classify_bell_state: eta_ab not at a 0 or pi endpoint (unclassified)");
  if (family == PairFamily::SamePort) return even ? BellLabel::PhiPlus : BellLabel::PsiPlus;
  return even ? BellLabel::PsiMinus : BellLabel::PhiMinus;
}

}  // namespace polcor::meas
