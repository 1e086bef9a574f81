#pragma once
//==============================================================================
// Wired max-flow routing.
//
// The wired multiple-unicast sum capacity equals the min-cut separating all
// sources from all sinks and is achieved by plain routing.  We attach a
// super-source/super-sink, run Edmonds-Karp with exact rational arithmetic,
// decompose the flow by shortest-path peeling (lexicographic tie-breaks for
// deterministic output), and label a path from source m to sink n with
// message W_mn.  The min-cut certificate comes from residual reachability.
//
// The solver works on a general DAG type; layered wired networks adapt onto
// it.  Arbitrary source/sink counts are allowed in wired mode.
//==============================================================================

#include <string>
#include <vector>

#include "xnet/network.hpp"
#include "xnet/rational.hpp"

namespace xnet {

struct WiredDag {
  int node_count = 0;
  std::vector<std::string> names;              // size node_count
  std::vector<int> sources;                    // node ids
  std::vector<int> sinks;                      // node ids
  struct Arc {
    int from = 0;
    int to = 0;
    Rational capacity;  // > 0
  };
  std::vector<Arc> arcs;
};

class FlowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Layered wired network -> DAG (names s1/v2.1/d1...).  Throws FlowError on a
// wireless network.
WiredDag to_wired_dag(const LayeredNetwork& net);

struct RoutedPath {
  int source_index = 0;  // position in WiredDag::sources
  int sink_index = 0;    // position in WiredDag::sinks
  Rational rate;         // > 0
  std::vector<int> nodes;          // node ids, source..sink
  std::string message;             // "W<m><n>", 1-based
};

struct FlowSolution {
  Rational sum_rate;
  std::vector<Rational> arc_flow;  // parallel to WiredDag::arcs
  std::vector<RoutedPath> paths;   // <= |arcs| paths, rates sum to sum_rate
  std::vector<int> cut_arcs;       // arc ids crossing the min cut
  std::vector<int> cut_source_side;  // node ids reachable in the residual
  Rational cut_value;                // == sum_rate
};

// Throws FlowError on a cyclic graph or a nonpositive capacity.
FlowSolution max_flow_routing(const WiredDag& dag);
FlowSolution max_flow_routing(const LayeredNetwork& net);

struct RoutingCheck {
  bool passed = false;
  std::vector<std::string> failures;
};

// Re-checks edge capacities, path contiguity and endpoints, label/source
// consistency, rate accounting, and max-flow = min-cut via the cut
// certificate.  (A path may be re-labeled to another message of the same
// source without failing: routing carries any message its source emits.)
RoutingCheck verify_routing(const WiredDag& dag, const FlowSolution& solution);

// Exhaustive min-cut over all source/sink-separating bipartitions; intended
// for graphs with <= ~20 nodes (test oracle).
Rational brute_force_min_cut(const WiredDag& dag);

}  // namespace xnet
