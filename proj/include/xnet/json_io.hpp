#pragma once
//==============================================================================
// Machine-readable reports.
//
// One builder per CLI subcommand, all emitting nlohmann ordered_json so that
// key order (and therefore serialized bytes) is deterministic for a given
// configuration.  CSV rendering for `simulate` lives here too.
//==============================================================================

#include <json.hpp>

#include <string>
#include <vector>

#include "xnet/bounds.hpp"
#include "xnet/classify.hpp"
#include "xnet/flow.hpp"
#include "xnet/network.hpp"
#include "xnet/scheme.hpp"
#include "xnet/simulate.hpp"

namespace xnet {

using Json = nlohmann::ordered_json;

Json network_summary_json(const LayeredNetwork& net,
                          const std::vector<ParseWarning>& warnings);

Json classify_json(const std::string& input, const LayeredNetwork& net,
                   const std::vector<ParseWarning>& warnings,
                   const ClassifyResult& result, uint64_t seed);

Json bounds_json(const std::string& input, const LayeredNetwork& net,
                 const std::vector<ParseWarning>& warnings,
                 const BoundReport& report);

Json scheme_json(const LinearScheme& scheme);

Json synthesize_json(const std::string& input, const LayeredNetwork& net,
                     const std::vector<ParseWarning>& warnings,
                     const SchemeSpec& spec, const SynthesisOutcome& outcome,
                     uint64_t seed, bool verified_requested);

Json simulate_json(const std::string& input, const SchemeSpec& spec,
                   const SlopeEstimate& estimate);

std::string simulate_csv(const SlopeEstimate& estimate);

Json maxflow_json(const std::string& input, const WiredDag& dag,
                  const FlowSolution& solution, const RoutingCheck& check);

}  // namespace xnet
