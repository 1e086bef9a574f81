// xnet: analyze 2x2 layered multihop interference networks.
//
//   xnet classify  <file.net>   exact sum-DoF class or bracket
//   xnet bounds    <file.net>   outer-bound inequalities + LP optimum
//   xnet synthesize <file.net>  build (and verify) an explicit linear scheme
//   xnet simulate  <file.net>   Monte-Carlo rate slopes at high SNR
//   xnet maxflow   <file.net>   wired routing: max flow, paths, min cut
//
// Exit codes: 0 success, 1 analysis failure, 2 input/usage error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "xnet/classify.hpp"
#include "xnet/flow.hpp"
#include "xnet/json_io.hpp"
#include "xnet/simulate.hpp"

namespace fs = std::filesystem;
using namespace xnet;

namespace {

constexpr uint64_t kDefaultSeed = 20260823ull;

struct CliError {
  int code;
  std::string text;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{2, "cannot open input file: " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty()) {
    std::cout << text;
    return;
  }
  fs::path p(output);
  if (p.is_relative())
    if (const char* dir = std::getenv("XNET_OUTPUT_DIR"))
      p = fs::path(dir) / p;
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw CliError{2, "cannot write output file: " + p.string()};
  out << text;
}

ParseResult load_network(const std::string& path) {
  try {
    return parse_network(read_file(path));
  } catch (const ParseError& e) {
    throw CliError{2, std::string("parse error: ") + e.what()};
  }
}

std::optional<MessageId> parse_message(const std::string& token) {
  if (token.size() == 3 && (token[0] == 'W' || token[0] == 'w') &&
      token[1] >= '1' && token[1] <= '2' && token[2] >= '1' && token[2] <= '2')
    return MessageId{token[1] - '1', token[2] - '1'};
  return std::nullopt;
}

std::optional<SchemeKind> parse_kind(const std::string& name) {
  if (name == "tdma") return SchemeKind::Tdma;
  if (name == "xz") return SchemeKind::XzFamily;
  if (name == "x_single_hop") return SchemeKind::XSingleHop;
  if (name == "neutralize") return SchemeKind::Neutralize;
  if (name == "five_thirds") return SchemeKind::FiveThirds;
  return std::nullopt;
}

// Pick the strongest builder this network admits and synthesize with it.
std::pair<SchemeSpec, SynthesisOutcome> resolve_and_synthesize(
    const LayeredNetwork& net, const std::string& scheme_flag,
    const std::string& keep_flag, uint64_t seed) {
  std::vector<SchemeSpec> candidates;
  if (scheme_flag != "auto") {
    auto kind = parse_kind(scheme_flag);
    if (!kind) throw CliError{2, "unknown scheme kind: " + scheme_flag};
    SchemeSpec spec{*kind, {}};
    if (*kind == SchemeKind::Neutralize) {
      spec.kept = {MessageId{0, 0}, MessageId{1, 1}};
      if (!keep_flag.empty()) {
        auto comma = keep_flag.find(',');
        auto a = parse_message(keep_flag.substr(0, comma));
        auto b = comma == std::string::npos
                     ? std::nullopt
                     : parse_message(keep_flag.substr(comma + 1));
        if (!a || !b)
          throw CliError{2, "bad --keep value, expected e.g. W12,W21"};
        spec.kept = {*a, *b};
      }
      candidates.push_back(spec);
    } else {
      if (!keep_flag.empty())
        throw CliError{2, "--keep only applies to --scheme neutralize"};
      candidates.push_back(spec);
    }
  } else {
    ClassifyResult cls = classify_general(net, seed);
    const std::string& prov = cls.value.provenance;
    if (prov == "T2") {
      candidates.push_back({SchemeKind::FiveThirds, {}});
    } else if (prov == "T1-B") {
      candidates.push_back({SchemeKind::XSingleHop, {}});
    } else if (prov == "T1-C") {
      std::string xz = "X" + std::string(cls.word->word.size() - 1, 'Z');
      if (cls.word && cls.word->word == xz)
        candidates.push_back({SchemeKind::XzFamily, {}});
    } else if (prov == "T1-D" || prov == "BRACKET") {
      candidates.push_back(
          {SchemeKind::Neutralize, {MessageId{0, 0}, MessageId{1, 1}}});
      candidates.push_back(
          {SchemeKind::Neutralize, {MessageId{0, 1}, MessageId{1, 0}}});
    }
    candidates.push_back({SchemeKind::Tdma, {}});
  }
  std::string last = "no applicable scheme builder";
  for (const SchemeSpec& spec : candidates) {
    try {
      SynthesisOutcome outcome = synthesize_with_retry(net, spec, seed);
      return {spec, std::move(outcome)};
    } catch (const SchemeError& e) {
      last = e.what();
    } catch (const DegenerateDrawError& e) {
      last = e.what();
    }
  }
  throw CliError{1, "synthesis failed: " + last};
}

std::string human_classify(const ClassifyResult& r) {
  std::ostringstream out;
  out << "word: " << (r.word ? r.word->word : std::string("-")) << "\n"
      << "sum DoF: " << to_string(r.value.value) << " ["
      << r.value.provenance << "]\n"
      << "min cut: " << r.min_cut << "\n"
      << "detail: " << r.detail << "\n";
  if (r.bracket)
    out << "bracket: [" << to_string(r.bracket->lower) << ", "
        << to_string(r.bracket->upper) << "]  lower by "
        << r.bracket->lower_witness << "\n";
  return out.str();
}

std::string human_bounds(const BoundReport& rep) {
  static const char* kMessages[4] = {"W11", "W12", "W21", "W22"};
  std::ostringstream out;
  for (const DofInequality& iq : rep.inequalities) {
    bool first = true;
    for (int k = 0; k < 4; ++k) {
      if (iq.coeffs[k] == 0) continue;
      if (!first) out << " + ";
      if (iq.coeffs[k] != 1) out << to_string(iq.coeffs[k]) << "*";
      out << "d(" << kMessages[k] << ")";
      first = false;
    }
    out << " <= " << to_string(iq.rhs) << "   [" << iq.rule << "] "
        << iq.justification << "\n";
  }
  out << "LP optimum: " << to_string(rep.lp.optimum) << " at (";
  for (int k = 0; k < 4; ++k)
    out << (k ? ", " : "") << to_string(rep.lp.vertex[k]);
  out << ")\n";
  return out.str();
}

int run(int argc, char** argv) {
  CLI::App app{
      "xnet: sum-DoF analysis of layered two-source two-sink networks"};
  app.require_subcommand(1);

  std::string input, format = "json", output, scheme_flag = "auto", keep_flag,
              snr_grid = "40:80:10";
  uint64_t seed = kDefaultSeed;
  int trials = 50;
  double tolerance = 1e-8;
  bool verify_flag = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("input", input, "network description file (.net)")
        ->required();
    sub->add_option("--format", format, "json|csv|human")
        ->check(CLI::IsMember({"json", "csv", "human"}));
    sub->add_option("--output", output,
                    "write to this file (relative paths land in "
                    "$XNET_OUTPUT_DIR when set)");
    sub->add_option("--seed", seed, "PRNG seed");
  };

  CLI::App* c_classify = app.add_subcommand("classify", "sum-DoF class");
  add_common(c_classify);
  CLI::App* c_bounds = app.add_subcommand("bounds", "outer bound report");
  add_common(c_bounds);
  CLI::App* c_synth =
      app.add_subcommand("synthesize", "build an explicit linear scheme");
  add_common(c_synth);
  c_synth->add_option("--scheme", scheme_flag,
                      "auto|tdma|xz|x_single_hop|neutralize|five_thirds");
  c_synth->add_option("--keep", keep_flag,
                      "kept messages for neutralize, e.g. W12,W21");
  c_synth->add_flag("--verify", verify_flag,
                    "include the full verification check list");
  c_synth->add_option("--tolerance", tolerance,
                      "relative rank tolerance for verification");
  CLI::App* c_sim =
      app.add_subcommand("simulate", "Monte-Carlo rate-slope estimate");
  add_common(c_sim);
  c_sim->add_option("--scheme", scheme_flag,
                    "auto|tdma|xz|x_single_hop|neutralize|five_thirds");
  c_sim->add_option("--keep", keep_flag,
                    "kept messages for neutralize, e.g. W12,W21");
  c_sim->add_option("--trials", trials, "trials per SNR point")
      ->check(CLI::PositiveNumber);
  c_sim->add_option("--snr-grid", snr_grid, "lo:hi:step in dB");
  CLI::App* c_flow =
      app.add_subcommand("maxflow", "wired max-flow routing and min cut");
  add_common(c_flow);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (format == "csv" && !c_sim->parsed())
      throw CliError{2, "--format csv is only available for simulate"};

    if (c_classify->parsed()) {
      ParseResult pr = load_network(input);
      if (pr.network.mode != NetMode::Wireless)
        throw CliError{2, "classify applies to wireless networks"};
      ClassifyResult r = classify_general(pr.network, seed);
      if (format == "human")
        emit(human_classify(r), output);
      else
        emit(classify_json(input, pr.network, pr.warnings, r, seed).dump(2) +
                 "\n",
             output);
      return 0;
    }
    if (c_bounds->parsed()) {
      ParseResult pr = load_network(input);
      if (pr.network.mode != NetMode::Wireless)
        throw CliError{2, "bounds applies to wireless networks"};
      BoundReport rep = outer_bound(pr.network);
      if (format == "human")
        emit(human_bounds(rep), output);
      else
        emit(bounds_json(input, pr.network, pr.warnings, rep).dump(2) + "\n",
             output);
      return 0;
    }
    if (c_synth->parsed()) {
      ParseResult pr = load_network(input);
      if (pr.network.mode != NetMode::Wireless)
        throw CliError{2, "synthesize applies to wireless networks"};
      auto [spec, outcome] =
          resolve_and_synthesize(pr.network, scheme_flag, keep_flag, seed);
      if (tolerance != 1e-8)
        outcome.report = verify_scheme(pr.network, outcome.channels,
                                       outcome.scheme, tolerance);
      if (format == "human") {
        std::ostringstream text;
        text << "scheme: " << scheme_kind_name(spec.kind) << " (T="
             << outcome.scheme.T << ", " << outcome.scheme.streams.size()
             << " streams)\n"
             << "verified: " << (outcome.report.passed ? "yes" : "NO")
             << ", sum DoF " << to_string(outcome.report.sum_dof)
             << ", max residual " << outcome.report.max_residual << "\n";
        emit(text.str(), output);
      } else {
        emit(synthesize_json(input, pr.network, pr.warnings, spec, outcome,
                             seed, verify_flag)
                     .dump(2) +
                 "\n",
             output);
      }
      return outcome.report.passed ? 0 : 1;
    }
    if (c_sim->parsed()) {
      ParseResult pr = load_network(input);
      if (pr.network.mode != NetMode::Wireless)
        throw CliError{2, "simulate applies to wireless networks"};
      std::vector<double> grid;
      try {
        grid = parse_snr_grid(snr_grid);
      } catch (const std::invalid_argument& e) {
        throw CliError{2, e.what()};
      }
      auto [spec, outcome] =
          resolve_and_synthesize(pr.network, scheme_flag, keep_flag, seed);
      (void)outcome;  // probe only; each trial re-synthesizes
      SlopeEstimate est;
      try {
        est = estimate_dof(pr.network, spec, grid, trials, seed);
      } catch (const std::invalid_argument& e) {
        throw CliError{2, e.what()};
      }
      if (format == "csv")
        emit(simulate_csv(est), output);
      else if (format == "human") {
        std::ostringstream text;
        for (const RatePoint& p : est.points)
          text << p.snr_db << " dB: " << p.sum_rate << " bits/use\n";
        text << "DoF estimate: " << est.dof_hat << " (stderr "
             << est.stderr_slope << ")\n";
        emit(text.str(), output);
      } else {
        emit(simulate_json(input, spec, est).dump(2) + "\n", output);
      }
      return 0;
    }
    if (c_flow->parsed()) {
      ParseResult pr = load_network(input);
      if (pr.network.mode != NetMode::Wired)
        throw CliError{2, "maxflow applies to wired networks"};
      WiredDag dag = to_wired_dag(pr.network);
      FlowSolution sol = max_flow_routing(dag);
      RoutingCheck check = verify_routing(dag, sol);
      if (format == "human") {
        std::ostringstream text;
        text << "max flow: " << to_string(sol.sum_rate) << "\n";
        for (const RoutedPath& p : sol.paths) {
          text << "  " << p.message << " rate " << to_string(p.rate) << ":";
          for (int v : p.nodes) text << " " << dag.names[v];
          text << "\n";
        }
        text << "min cut: " << to_string(sol.cut_value) << " ("
             << sol.cut_arcs.size() << " arcs)\n"
             << "verified: " << (check.passed ? "yes" : "NO") << "\n";
        emit(text.str(), output);
      } else {
        emit(maxflow_json(input, dag, sol, check).dump(2) + "\n", output);
      }
      return check.passed ? 0 : 1;
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.text << "\n";
    return e.code;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const FlowError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "analysis failed: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
