#pragma once
//==============================================================================
// Layered network model.
//
// A LayeredNetwork is a directed graph organized in layers 0..L: layer 0
// holds the sources, layer L the sinks, and edges exist only between adjacent
// layers.  Wireless networks carry optional complex coefficients per edge;
// wired networks carry positive rational capacities.
//
// Text format (see parse_network):
//   layers: [2, 2, 2]
//   mode: wireless
//   edge 1 1 1            # hop 1, tx node 1, rx node 1 (all 1-based)
//   edge 1 1 2 0.3 -1.25  # optional coefficient (re, im) in wireless mode
//   link s1 v1.2          # named-endpoint alternative to "edge"
// Wired mode replaces the coefficient with a single positive rational
// capacity ("edge 1 1 1 3/4"; default 1 when omitted).
//==============================================================================

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xnet/rational.hpp"

namespace xnet {

enum class NetMode { Wireless, Wired };

// Node address: layer 0..L, index 0-based within the layer.
struct NodeRef {
  int layer = 0;
  int index = 0;
  friend bool operator==(const NodeRef&, const NodeRef&) = default;
  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

struct Edge {
  int hop = 0;  // tail layer l; the edge runs from (l, tx) to (l+1, rx)
  int tx = 0;   // 0-based index in layer l
  int rx = 0;   // 0-based index in layer l+1
  std::optional<std::complex<double>> coeff;  // wireless only
  std::optional<Rational> capacity;           // wired only
  friend bool operator==(const Edge& a, const Edge& b) {
    return a.hop == b.hop && a.tx == b.tx && a.rx == b.rx;
  }
};

struct ParseWarning {
  std::string message;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LayeredNetwork {
  std::vector<int> layers;  // node count per layer, size L+1
  NetMode mode = NetMode::Wireless;
  std::vector<Edge> edges;  // kept sorted by (hop, tx, rx), no duplicates

  int hop_count() const { return static_cast<int>(layers.size()) - 1; }
  int num_sources() const { return layers.front(); }
  int num_sinks() const { return layers.back(); }

  bool has_edge(int hop, int tx, int rx) const;
  const Edge* find_edge(int hop, int tx, int rx) const;

  // Receivers of (hop, tx) in layer hop+1, ascending.
  std::vector<int> rx_neighbors(int hop, int tx) const;
  // Transmitters in layer hop with an edge into (hop+1, rx), ascending.
  std::vector<int> tx_neighbors(int hop, int rx) const;

  // Number of distinct directed paths from source m to sink n (0-based).
  long long path_count(int m, int n) const;
  // true if node u lies on at least one source->sink path.
  bool on_some_path(NodeRef u) const;

  // Human-readable node name: "s1", "v2.1", "d2" (all 1-based).
  std::string node_name(NodeRef u) const;
};

struct ParseResult {
  LayeredNetwork network;
  std::vector<ParseWarning> warnings;
};

// Parses and validates a network document.  Relays that sit on no
// source->sink path are pruned (smaller layers, reindexed) with one warning
// per removed node.  Throws ParseError on malformed input, a non-layered
// `link`, wrong terminal layer sizes (wireless mode requires exactly two
// sources and two sinks), or a zero wireless coefficient.
ParseResult parse_network(const std::string& text);

// Canonical document: header lines then edges sorted by (l, i, j).
// parse(serialize(parse(text))) == parse(text).
std::string serialize(const LayeredNetwork& net);

// Maximum number of vertex-disjoint source->sink paths, via node-splitting
// unit-capacity max-flow.  This is the generic rank of the end-to-end
// transfer matrix for layered graphs with generic coefficients, and the
// cooperative DoF cut bound used by classification.  Disconnected -> 0.
int generic_min_cut(const LayeredNetwork& net);

}  // namespace xnet
