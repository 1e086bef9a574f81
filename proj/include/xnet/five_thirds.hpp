#pragma once
//==============================================================================
// The five-thirds reference topology and its isomorphism matcher.
//
// Reference network, layers [2, 3, 3, 2], 11 edges (0-based indices):
//   hop 0:  s1->v1.1  s1->v1.2  s2->v1.3
//   hop 1:  v1.1->v2.1  v1.1->v2.2  v1.2->v2.3  v1.3->v2.1  v1.3->v2.3
//   hop 2:  v2.1->d1  v2.2->d2  v2.3->d2
// Key structure: d1 hears exactly one relay; that relay hears exactly one
// relay per source side; one middle relay hears only the s1-side.  The
// genie certificate and the 5/3 scheme builder both key off this shape.
//==============================================================================

#include <array>
#include <optional>
#include <vector>

#include "xnet/network.hpp"

namespace xnet {

inline const std::vector<Edge>& five_thirds_reference_edges() {
  static const std::vector<Edge> edges = {
      {0, 0, 0, {}, {}}, {0, 0, 1, {}, {}}, {0, 1, 2, {}, {}},
      {1, 0, 0, {}, {}}, {1, 0, 1, {}, {}}, {1, 1, 2, {}, {}},
      {1, 2, 0, {}, {}}, {1, 2, 2, {}, {}},
      {2, 0, 0, {}, {}}, {2, 1, 1, {}, {}}, {2, 2, 1, {}, {}}};
  return edges;
}

inline std::vector<int> five_thirds_layers() { return {2, 3, 3, 2}; }

// Per-layer maps sigma[l]: reference index -> net index such that reference
// edge (l, i, j) maps onto a net edge (l, sigma[l](i), sigma[l+1](j)), with
// exact edge-set equality.  nullopt if the network is not this topology.
std::optional<std::array<std::vector<int>, 4>> match_five_thirds(
    const LayeredNetwork& net);

}  // namespace xnet
