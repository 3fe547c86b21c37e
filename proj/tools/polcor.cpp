// polcor: time-bin polarization-correlation toolkit.
//
// Subcommands: simulate, local-scan, fringe-scan, chsh, algebra, run-party,
// run-correlator, verify. See README.md for the workflow.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "polcor/acceptance.hpp"
#include "polcor/config_io.hpp"
#include "polcor/csv.hpp"
#include "polcor/harness.hpp"

using namespace polcor;
using algebra::DetectorPair;
using csv::format_double;
using optics::Party;
using sim::OpticalConfig;

namespace {

struct CommonArgs {
  std::optional<std::string> config_path;
  cli::ConfigOverrides flags;
  std::optional<std::string> out_path;
  std::optional<std::string> pair_name;
  std::optional<std::string> sweep_text;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_sweep) {
  cmd->add_option("--config", args.config_path, "flat key=value config file");
  cmd->add_option("--theta", args.flags.theta, "Alice analyzer angle (rad)");
  cmd->add_option("--xi", args.flags.xi, "Bob analyzer angle (rad)");
  cmd->add_option("--psi-a", args.flags.psi_a, "Alice MZI path phase (rad)");
  cmd->add_option("--psi-b", args.flags.psi_b, "Bob MZI path phase (rad)");
  cmd->add_option("--eta", args.flags.eta, "modulator phase (rad)");
  cmd->add_option("--i0", args.flags.i0, "per-bin per-party intensity");
  cmd->add_option("--bins", args.flags.n_bins, "number of time bins");
  cmd->add_option("--duty", args.flags.duty, "A-pulse duty cycle in (0,1)");
  cmd->add_option("--seed", args.flags.seed, "64-bit schedule seed");
  cmd->add_option("--overlap", args.flags.overlap, "separated | coherent");
  cmd->add_option("--out", args.out_path, "output file (default stdout)");
  cmd->add_option("--pair", args.pair_name, "detector pair: AB, CD, AD or BC");
  if (with_sweep)
    cmd->add_option("--sweep", args.sweep_text, "NAME:START:STOP:STEPS parameter sweep");
}

OpticalConfig resolve(const CommonArgs& args) {
  return cli::build_config(args.config_path, args.flags);
}

void emit(const CommonArgs& args, const std::string& content) {
  if (args.out_path)
    csv::write_atomic(*args.out_path, content);
  else
    std::cout << content;
}

DetectorPair parse_pair(const std::string& name) {
  if (name == "AB") return DetectorPair::AB;
  if (name == "CD") return DetectorPair::CD;
  if (name == "AD") return DetectorPair::AD;
  if (name == "BC") return DetectorPair::BC;
  throw std::invalid_argument("unknown detector pair '" + name + "' (expected AB, CD, AD, BC)");
}

std::vector<DetectorPair> requested_pairs(const CommonArgs& args) {
  if (!args.pair_name) {
    const auto all = harness::all_pairs();
    return {all.begin(), all.end()};
  }
  return {parse_pair(*args.pair_name)};
}

int cmd_simulate(const CommonArgs& args, const std::optional<std::string>& dump_alice,
                 const std::optional<std::string>& dump_bob) {
  const OpticalConfig cfg = resolve(args);
  if (cfg.overlap != sim::OverlapMode::Separated)
    throw std::invalid_argument(
        "simulate needs separated mode (coherent-overlap fringes: use local-scan --sweep eta)");
  const std::vector<DetectorPair> pairs = requested_pairs(args);
  const sim::SimulationRun run = sim::simulate(cfg);
  if (dump_alice) {
    const auto bytes = wire::encode_stream(cfg, Party::Alpha, run.alice);
    harness::FileSink(*dump_alice).write(bytes);
  }
  if (dump_bob) {
    const auto bytes = wire::encode_stream(cfg, Party::Beta, run.bob);
    harness::FileSink(*dump_bob).write(bytes);
  }
  const meas::BinPairing pairing = meas::pair_bins(run.schedule);
  std::vector<meas::PairCorrelation> rows;
  for (DetectorPair p : pairs)
    rows.push_back(meas::estimate_R(pairing, run.alice, run.bob, p, cfg));
  emit(args, csv::correlation_csv(cfg, rows));
  return 0;
}

int cmd_local_scan(const CommonArgs& args) {
  const OpticalConfig cfg = resolve(args);
  const cli::SweepSpec sweep =
      cli::parse_sweep(args.sweep_text.value_or("psi_a:0:6.283185307179586:16"));
  std::vector<csv::LocalScanRow> rows;
  for (int i = 0; i < sweep.steps; ++i) {
    const double value = sweep.value_at(i);
    const sim::SimulationRun run = sim::simulate(cli::with_param(cfg, sweep.param, value));
    rows.push_back(csv::LocalScanRow{sweep.param, value, meas::local_stats(run.alice)});
    rows.push_back(csv::LocalScanRow{sweep.param, value, meas::local_stats(run.bob)});
  }
  emit(args, csv::local_scan_csv(cfg, rows));
  return 0;
}

int cmd_fringe_scan(const CommonArgs& args) {
  const OpticalConfig cfg = resolve(args);
  const cli::SweepSpec sweep = cli::parse_sweep(args.sweep_text.value_or("xi:0:3.141592653589793:32"));
  const std::vector<DetectorPair> pairs = requested_pairs(args);

  std::string s = "# polcor fringe-scan\n";
  s += csv::config_comment(cfg, "fringe-scan --sweep " + sweep.param + ":" +
                                    format_double(sweep.start) + ":" + format_double(sweep.stop) +
                                    ":" + std::to_string(sweep.steps));
  s += "pair,theta,xi,psi_a,psi_b,eta,eta_ab,n_pairs,discarded_fraction,estimate,closed_form,"
       "std_err\n";
  for (int i = 0; i < sweep.steps; ++i) {
    const OpticalConfig swept = cli::with_param(cfg, sweep.param, sweep.value_at(i));
    const sim::SimulationRun run = sim::simulate(swept);
    const meas::BinPairing pairing = meas::pair_bins(run.schedule);
    for (DetectorPair p : pairs) {
      const meas::PairCorrelation pc = meas::estimate_R(pairing, run.alice, run.bob, p, swept);
      s += std::string(to_string(p)) + "," + format_double(swept.theta) + "," +
           format_double(swept.xi) + "," + format_double(swept.psi_a) + "," +
           format_double(swept.psi_b) + "," + format_double(swept.eta) + "," +
           format_double(swept.phases().eta_ab()) + "," + std::to_string(pc.n_pairs) + "," +
           format_double(pc.discarded_fraction) + "," + format_double(pc.estimate) + "," +
           format_double(pc.closed_form) + "," + format_double(pc.std_err) + "\n";
    }
  }
  emit(args, s);
  return 0;
}

int cmd_chsh(const CommonArgs& args, const std::string& angles_text) {
  const OpticalConfig cfg = resolve(args);
  double a = 0.0, ap = M_PI / 4.0, b = M_PI / 8.0, bp = 3.0 * M_PI / 8.0;
  if (!angles_text.empty()) {
    if (std::sscanf(angles_text.c_str(), "%lf:%lf:%lf:%lf", &a, &ap, &b, &bp) != 4)
      throw std::invalid_argument("--angles must be A:APRIME:B:BPRIME in radians");
  }
  const meas::ChshResult closed = meas::chsh_closed_form(a, ap, b, bp, cfg.phases().eta_ab(), cfg.i0);
  const meas::ChshResult mc = meas::chsh_mc(cfg, a, ap, b, bp);
  emit(args, csv::chsh_csv(cfg, closed, mc));
  std::cerr << "S closed-form = " << format_double(closed.s_value)
            << ", S monte-carlo = " << format_double(mc.s_value) << " (|S| > 2 violates the CHSH bound)\n";
  return 0;
}

std::string complex_field(const optics::Complex& c) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.6f %+.6fi", c.real(), c.imag());
  return buf;
}

int cmd_algebra(const CommonArgs& args) {
  const OpticalConfig cfg = resolve(args);
  const DetectorPair pair = args.pair_name ? parse_pair(*args.pair_name) : DetectorPair::AB;
  double port_a = cfg.theta, port_b = cfg.xi;
  switch (pair) {
    case DetectorPair::AB: break;
    case DetectorPair::CD: port_a += M_PI_2; port_b += M_PI_2; break;
    case DetectorPair::AD: port_b += M_PI_2; break;
    case DetectorPair::BC: port_a += M_PI_2; break;
  }
  const optics::PhaseSet phases = cfg.phases();
  const auto terms = algebra::expand_joint(optics::make_party_fields(Party::Alpha, phases, cfg.i0),
                                           optics::make_party_fields(Party::Beta, phases, cfg.i0),
                                           port_a, port_b);
  const algebra::ReducedJoint joint = algebra::reduce(terms);

  std::string s;
  s += "# joint-product expansion, pair " + std::string(to_string(pair)) + "\n";
  s += "# theta=" + format_double(cfg.theta) + " xi=" + format_double(cfg.xi) +
       " eta_ab=" + format_double(phases.eta_ab()) + " i0=" + format_double(cfg.i0) + "\n";
  s += "# alice port angle=" + format_double(port_a) + " bob port angle=" + format_double(port_b) +
       "\n\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %-7s %-10s %-24s %s\n", "term", "source", "class",
                "coefficient", "rule");
  s += line;
  for (const algebra::ProductTerm& t : terms) {
    const std::string term_name =
        std::string(to_string(t.alpha_mode)) + "^a." + to_string(t.beta_mode) + "^b";
    const char* rule = t.zero_rule();
    std::snprintf(line, sizeof(line), "%-10s %-7s %-10s %-24s %s\n", term_name.c_str(),
                  to_string(t.source), rule ? "--" : to_string(t.basis_class),
                  complex_field(t.coef).c_str(), rule ? (std::string("zeroed: ") + rule).c_str() : "kept");
    s += line;
  }
  s += "\n";
  s += "merge HH+VV (DD with AA x e^{i eta_ab}) -> same-pol  = " + complex_field(joint.same_pol) +
       "   rule: 50/50 splitter makes the two same-pol products one basis element\n";
  s += "merge HV+VH (DD with AA x e^{i eta_ab}) -> cross-pol = " + complex_field(joint.cross_pol) +
       "   rule: 50/50 splitter makes the two cross-pol products one basis element\n";
  s += "R = scale * (|same-pol|^2 + |cross-pol|^2) = " + format_double(joint.value()) +
       " I0^2  (scale=" + format_double(joint.scale) + ")\n";
  s += "closed form R_" + std::string(to_string(pair)) + " = " +
       format_double(algebra::closed_form_R(pair, cfg.theta, cfg.xi, phases.eta_ab(), 1.0)) +
       " I0^2\n";
  emit(args, s);
  return 0;
}

int cmd_run_party(const CommonArgs& args, const std::string& role_name,
                  const std::string& connect_spec) {
  const OpticalConfig cfg = resolve(args);
  Party role;
  if (role_name == "alice") role = Party::Alpha;
  else if (role_name == "bob") role = Party::Beta;
  else throw std::invalid_argument("--role must be alice or bob");

  harness::PartySummary summary{};
  if (!connect_spec.empty()) {
    const auto colon = connect_spec.rfind(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("--connect expects HOST:PORT");
    harness::Socket sock = harness::connect(connect_spec.substr(0, colon),
                                            static_cast<std::uint16_t>(
                                                std::stoul(connect_spec.substr(colon + 1))));
    summary = harness::run_party(role, cfg, sock);
  } else if (args.out_path) {
    harness::FileSink sink(*args.out_path);
    summary = harness::run_party(role, cfg, sink);
  } else {
    throw std::invalid_argument("run-party needs --connect HOST:PORT or --out FILE");
  }
  std::cerr << role_name << ": emitted " << summary.bins_emitted << " bins\n";
  return 0;
}

int cmd_run_correlator(const CommonArgs& args, const std::string& listen_spec,
                       const std::string& alice_file, const std::string& bob_file) {
  const OpticalConfig cfg = resolve(args);
  const std::vector<DetectorPair> pairs = requested_pairs(args);
  harness::CorrelatorResult result;
  if (!listen_spec.empty()) {
    const auto colon = listen_spec.rfind(':');
    const std::string host = colon == std::string::npos ? listen_spec : listen_spec.substr(0, colon);
    const std::uint16_t port = colon == std::string::npos
                                   ? 0
                                   : static_cast<std::uint16_t>(std::stoul(listen_spec.substr(colon + 1)));
    harness::Listener listener(host.empty() ? "127.0.0.1" : host, port);
    std::cerr << "listening on port " << listener.port() << ", waiting for two parties\n";
    harness::Socket first = listener.accept();
    harness::Socket second = listener.accept();
    result = harness::run_correlator(first, second, cfg, pairs);
  } else if (!alice_file.empty() && !bob_file.empty()) {
    harness::FileSource first(alice_file), second(bob_file);
    result = harness::run_correlator(first, second, cfg, pairs);
  } else {
    throw std::invalid_argument("run-correlator needs --listen HOST:PORT or --alice/--bob files");
  }
  emit(args, result.csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polcor: classical time-bin polarization-correlation toolkit"};
  app.require_subcommand(1);

  CommonArgs sim_args, local_args, fringe_args, chsh_args, algebra_args, party_args, corr_args;
  std::optional<std::string> dump_alice, dump_bob;
  std::string chsh_angles, role_name, connect_spec, listen_spec, alice_file, bob_file;

  CLI::App* c_sim = app.add_subcommand("simulate", "full pipeline: schedule, optics, pairing, R");
  add_common(c_sim, sim_args, false);
  c_sim->add_option("--dump-alice", dump_alice, "write Alice's wire-format stream to FILE");
  c_sim->add_option("--dump-bob", dump_bob, "write Bob's wire-format stream to FILE");

  CLI::App* c_local = app.add_subcommand("local-scan", "per-port mean intensities vs a swept parameter");
  add_common(c_local, local_args, true);

  CLI::App* c_fringe = app.add_subcommand("fringe-scan", "R_XY vs a swept parameter");
  add_common(c_fringe, fringe_args, true);

  CLI::App* c_chsh = app.add_subcommand("chsh", "CHSH S at four analyzer settings");
  add_common(c_chsh, chsh_args, false);
  c_chsh->add_option("--angles", chsh_angles, "A:APRIME:B:BPRIME (rad), default 0:pi/4:pi/8:3pi/8");

  CLI::App* c_alg = app.add_subcommand("algebra", "print the product-basis expansion and reduction");
  add_common(c_alg, algebra_args, false);

  CLI::App* c_party = app.add_subcommand("run-party", "emit one party's detector stream");
  add_common(c_party, party_args, false);
  c_party->add_option("--role", role_name, "alice | bob")->required();
  c_party->add_option("--connect", connect_spec, "correlator HOST:PORT");

  CLI::App* c_corr = app.add_subcommand("run-correlator", "join two party streams and estimate R");
  add_common(c_corr, corr_args, false);
  c_corr->add_option("--listen", listen_spec, "HOST:PORT to accept the two parties on");
  c_corr->add_option("--alice", alice_file, "Alice stream file");
  c_corr->add_option("--bob", bob_file, "Bob stream file");

  CLI::App* c_verify = app.add_subcommand("verify", "run the acceptance suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_sim->parsed()) return cmd_simulate(sim_args, dump_alice, dump_bob);
    if (c_local->parsed()) return cmd_local_scan(local_args);
    if (c_fringe->parsed()) return cmd_fringe_scan(fringe_args);
    if (c_chsh->parsed()) return cmd_chsh(chsh_args, chsh_angles);
    if (c_alg->parsed()) return cmd_algebra(algebra_args);
    if (c_party->parsed()) return cmd_run_party(party_args, role_name, connect_spec);
    if (c_corr->parsed()) return cmd_run_correlator(corr_args, listen_spec, alice_file, bob_file);
    if (c_verify->parsed()) return acceptance::run_cli(std::cout);
  } catch (const wire::WireError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return wire::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
