#pragma once
//==============================================================================
// Hop connectivity patterns for two-relay-per-layer networks.
//
// Each hop of a network whose layers all have width 2 is one of the seven
// 2x2 binary matrices with no empty row or column.  Rows index transmitters,
// columns receivers.  Letters:
//   P = {(1,1),(2,2)}          parallel
//   Z = {(1,1),(1,2),(2,2)}    upper-triangular 3-edge pattern
//   S = {(1,1),(2,1),(2,2)}    lower-triangular 3-edge pattern
//   X = all four edges
// The three remaining matrices are column swaps of P, Z, S and are coded as
// that letter plus a swap flag (swapping labels within a layer does not
// change the capacity region).
//
// Canonical form of a word: delete P letters (a parallel hop just relabels
// the chain), then take the lexicographically minimal letter word over all
// per-layer label swaps, under the letter order P < Z < S < X.  ASCII order
// would pick the wrong orbit representatives; the comparison is explicit.
//==============================================================================

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "xnet/network.hpp"

namespace xnet {

// m[tx][rx] over {0,1}.
using HopMatrix = std::array<std::array<int, 2>, 2>;

struct HopPattern {
  char letter = 'P';     // 'P','Z','S','X'
  bool swapped = false;  // true if the hop is the column swap of `letter`
  HopMatrix matrix{};    // the actual hop matrix (letter + swap applied)
};

struct PatternString {
  std::string word;  // one letter per hop, over {P,Z,S,X}
  friend bool operator==(const PatternString&, const PatternString&) = default;
};

class PatternError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

HopMatrix letter_matrix(char letter);  // P/Z/S/X -> matrix

// Classifies a hop matrix.  Throws PatternError if a row or column is empty
// (the hop would force structural min-cut <= 1 and has no letter).
HopPattern classify_hop(const HopMatrix& m);

// Letter sequence of a network whose layers all have exactly 2 nodes;
// mirrored 3-edge hops are coded by their Z/S equivalent.  Throws
// PatternError on any layer of width != 2 or a hop with an empty row/column.
PatternString pattern_word(const LayeredNetwork& net);

// Order P < Z < S < X; false for any other character.
bool letter_less(char a, char b);
bool word_less(const std::string& a, const std::string& b);

// Canonical representative of the word's swap orbit (see header comment).
// All-P words canonicalize to "P".  Throws PatternError on foreign letters.
PatternString canonicalize(const PatternString& word);

// All distinct letter words reachable from `word` by per-layer label swaps
// (P letters retained).  Exposed for the exhaustive orbit tests.
std::vector<std::string> swap_orbit(const std::string& word);

}  // namespace xnet
