#include "xnet/json_io.hpp"

#include <cstdio>

namespace xnet {

namespace {

Json complex_json(const std::complex<double>& c) {
  return Json::array({c.real(), c.imag()});
}

Json vector_json(const Eigen::VectorXcd& v) {
  Json out = Json::array();
  for (int t = 0; t < v.size(); ++t) out.push_back(complex_json(v(t)));
  return out;
}

Json inequality_json(const DofInequality& iq) {
  Json coeffs = Json::array();
  for (const Rational& c : iq.coeffs) coeffs.push_back(to_string(c));
  return Json{{"coeffs", coeffs},
              {"rhs", to_string(iq.rhs)},
              {"rule", iq.rule},
              {"witness", iq.justification}};
}

Json point_json(const std::array<Rational, 4>& v) {
  Json out = Json::array();
  for (const Rational& c : v) out.push_back(to_string(c));
  return out;
}

std::string relay_name(NodeRef node) {
  return "v" + std::to_string(node.layer) + "." +
         std::to_string(node.index + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

Json network_summary_json(const LayeredNetwork& net,
                          const std::vector<ParseWarning>& warnings) {
  Json layers = Json::array();
  for (int w : net.layers) layers.push_back(w);
  Json warn = Json::array();
  for (const ParseWarning& w : warnings) warn.push_back(w.message);
  int nodes = 0;
  for (int w : net.layers) nodes += w;
  return Json{{"layers", layers},
              {"mode", net.mode == NetMode::Wireless ? "wireless" : "wired"},
              {"nodes", nodes},
              {"edges", static_cast<int>(net.edges.size())},
              {"warnings", warn}};
}

Json classify_json(const std::string& input, const LayeredNetwork& net,
                   const std::vector<ParseWarning>& warnings,
                   const ClassifyResult& result, uint64_t seed) {
  Json out{{"command", "classify"},
           {"input", input},
           {"seed", seed},
           {"network", network_summary_json(net, warnings)}};
  out["word"] = result.word ? Json(result.word->word) : Json(nullptr);
  out["value"] = to_string(result.value.value);
  out["value_num"] =
      static_cast<long long>(result.value.value.get_num().get_si());
  out["value_den"] =
      static_cast<long long>(result.value.value.get_den().get_si());
  out["provenance"] = result.value.provenance;
  out["min_cut"] = result.min_cut;
  out["detail"] = result.detail;
  if (result.bracket) {
    const DofBracket& b = *result.bracket;
    Json wit = Json::array();
    for (const DofInequality& iq : b.upper_witness)
      wit.push_back(inequality_json(iq));
    out["bracket"] = Json{{"lower", to_string(b.lower)},
                          {"upper", to_string(b.upper)},
                          {"lower_witness", b.lower_witness},
                          {"upper_vertex", point_json(b.upper_vertex)},
                          {"upper_witness", wit}};
  }
  return out;
}

Json bounds_json(const std::string& input, const LayeredNetwork& net,
                 const std::vector<ParseWarning>& warnings,
                 const BoundReport& report) {
  static const char* kMessages[4] = {"W11", "W12", "W21", "W22"};
  Json absent = Json::array();
  for (int k = 0; k < 4; ++k)
    if (report.absent[k]) absent.push_back(kMessages[k]);
  Json ineqs = Json::array();
  for (const DofInequality& iq : report.inequalities)
    ineqs.push_back(inequality_json(iq));
  return Json{{"command", "bounds"},
              {"input", input},
              {"network", network_summary_json(net, warnings)},
              {"absent", absent},
              {"inequalities", ineqs},
              {"lp",
               Json{{"optimum", to_string(report.lp.optimum)},
                    {"vertex", point_json(report.lp.vertex)}}}};
}

Json scheme_json(const LinearScheme& scheme) {
  Json streams = Json::array();
  for (const Stream& st : scheme.streams)
    streams.push_back(Json{{"name", st.name},
                           {"message", message_name(st.message)},
                           {"direction", vector_json(st.direction)}});
  Json relays = Json::array();
  for (const RelayOp& op : scheme.relay_ops) {
    Json r{{"node", relay_name(op.node)}};
    if (op.kind == RelayOp::Kind::AmplifyForward) {
      r["mode"] = "amplify_forward";
      r["gain"] = vector_json(op.af_gain);
    } else {
      r["mode"] = "decode_forward";
      Json groups = Json::array();
      for (const DemodGroup& g : op.groups) {
        Json ids = Json::array();
        for (int s : g.stream_ids) ids.push_back(scheme.streams[s].name);
        groups.push_back(ids);
      }
      r["groups"] = groups;
      Json fwds = Json::array();
      for (const ForwardEntry& f : op.forwards) {
        Json combo = Json::array();
        for (const auto& [sid, coeff] : f.combo)
          combo.push_back(Json{{"stream", scheme.streams[sid].name},
                               {"coeff", complex_json(coeff)}});
        fwds.push_back(
            Json{{"direction", vector_json(f.direction)}, {"combo", combo}});
      }
      r["forwards"] = fwds;
    }
    relays.push_back(std::move(r));
  }
  Json desired = Json::object();
  for (size_t n = 0; n < scheme.desired.size(); ++n) {
    Json ids = Json::array();
    for (int s : scheme.desired[n]) ids.push_back(scheme.streams[s].name);
    desired["d" + std::to_string(n + 1)] = ids;
  }
  return Json{{"extension", scheme.T},
              {"streams", streams},
              {"relays", relays},
              {"desired", desired}};
}

Json synthesize_json(const std::string& input, const LayeredNetwork& net,
                     const std::vector<ParseWarning>& warnings,
                     const SchemeSpec& spec, const SynthesisOutcome& outcome,
                     uint64_t seed, bool verified_requested) {
  Json out{{"command", "synthesize"},
           {"input", input},
           {"seed", seed},
           {"network", network_summary_json(net, warnings)},
           {"scheme_kind", scheme_kind_name(spec.kind)}};
  if (spec.kind == SchemeKind::Neutralize)
    out["kept"] = Json::array(
        {message_name(spec.kept[0]), message_name(spec.kept[1])});
  out["redraws"] = outcome.redraws;
  out["scheme"] = scheme_json(outcome.scheme);
  Json ver{{"passed", outcome.report.passed},
           {"sum_dof", to_string(outcome.report.sum_dof)},
           {"max_residual", outcome.report.max_residual}};
  if (verified_requested) {
    Json checks = Json::array();
    for (const CheckEntry& c : outcome.report.checks)
      checks.push_back(Json{{"node", c.node},
                            {"kind", c.kind},
                            {"ok", c.ok},
                            {"detail", c.detail}});
    ver["checks"] = checks;
  }
  out["verification"] = ver;
  return out;
}

Json simulate_json(const std::string& input, const SchemeSpec& spec,
                   const SlopeEstimate& estimate) {
  static const char* kMessages[4] = {"W11", "W12", "W21", "W22"};
  Json points = Json::array();
  Json grid = Json::array();
  for (const RatePoint& p : estimate.points) {
    grid.push_back(p.snr_db);
    Json per = Json::object();
    for (int k = 0; k < 4; ++k) per[kMessages[k]] = p.per_message[k];
    points.push_back(Json{{"snr_db", p.snr_db},
                          {"sum_rate", p.sum_rate},
                          {"per_message", per},
                          {"trials", p.trials},
                          {"seed", p.seed}});
  }
  Json slopes = Json::object();
  for (int k = 0; k < 4; ++k) slopes[kMessages[k]] = estimate.per_message[k];
  return Json{{"command", "simulate"},
              {"input", input},
              {"scheme_kind", scheme_kind_name(spec.kind)},
              {"seed", estimate.seed},
              {"trials", estimate.trials},
              {"grid_db", grid},
              {"points", points},
              {"dof_hat", estimate.dof_hat},
              {"stderr", estimate.stderr_slope},
              {"rms_residual", estimate.residual},
              {"per_message_slopes", slopes}};
}

std::string simulate_csv(const SlopeEstimate& estimate) {
  std::string out =
      "snr_db,sum_rate,rate_w11,rate_w12,rate_w21,rate_w22,trials,seed\n";
  for (const RatePoint& p : estimate.points) {
    out += fmt_double(p.snr_db) + "," + fmt_double(p.sum_rate);
    for (int k = 0; k < 4; ++k) out += "," + fmt_double(p.per_message[k]);
    out += "," + std::to_string(p.trials) + "," + std::to_string(p.seed) +
           "\n";
  }
  return out;
}

Json maxflow_json(const std::string& input, const WiredDag& dag,
                  const FlowSolution& solution, const RoutingCheck& check) {
  Json paths = Json::array();
  for (const RoutedPath& p : solution.paths) {
    Json nodes = Json::array();
    for (int v : p.nodes) nodes.push_back(dag.names[v]);
    paths.push_back(Json{{"message", p.message},
                         {"rate", to_string(p.rate)},
                         {"nodes", nodes}});
  }
  Json arcs = Json::array();
  for (size_t k = 0; k < dag.arcs.size(); ++k)
    arcs.push_back(Json{{"from", dag.names[dag.arcs[k].from]},
                        {"to", dag.names[dag.arcs[k].to]},
                        {"capacity", to_string(dag.arcs[k].capacity)},
                        {"flow", to_string(solution.arc_flow[k])}});
  Json side = Json::array();
  for (int v : solution.cut_source_side) side.push_back(dag.names[v]);
  Json cut_arcs = Json::array();
  for (int k : solution.cut_arcs)
    cut_arcs.push_back(Json{{"from", dag.names[dag.arcs[k].from]},
                            {"to", dag.names[dag.arcs[k].to]}});
  Json failures = Json::array();
  for (const std::string& f : check.failures) failures.push_back(f);
  return Json{{"command", "maxflow"},
              {"input", input},
              {"sum_rate", to_string(solution.sum_rate)},
              {"paths", paths},
              {"arc_flows", arcs},
              {"cut",
               Json{{"value", to_string(solution.cut_value)},
                    {"source_side", side},
                    {"arcs", cut_arcs}}},
              {"verified", check.passed},
              {"failures", failures}};
}

}  // namespace xnet
