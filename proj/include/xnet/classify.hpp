#pragma once
//==============================================================================
// Sum-DoF classification.
//
// Two-relay-per-layer networks are classified exactly from their canonical
// connectivity word:
//   T1-A  L=1, word Z or S            -> 1
//   T1-B  L=1, word X                 -> 4/3
//   T1-C  L>=2, one of the eight patterns XZ^(L-1), XS^(L-1), Z^(L-1)X,
//         S^(L-1)X, ZS^(L-1), SZ^(L-1), S^(L-1)Z, Z^(L-1)S  -> 3/2
//   T1-D  otherwise (including the all-parallel word "P")    -> 2
// Wider networks: a structural min-cut of 1 gives 1 (MINCUT1); the specific
// [2,3,3,2] five-thirds topology gives 5/3 (T2); anything else gets a
// bracket [best verified scheme, LP outer bound] (BRACKET).
//==============================================================================

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xnet/bounds.hpp"
#include "xnet/network.hpp"
#include "xnet/pattern.hpp"
#include "xnet/rational.hpp"
#include "xnet/scheme.hpp"

namespace xnet {

struct DofValue {
  Rational value;          // in {1, 4/3, 3/2, 5/3, 2} for exact provenances
  std::string provenance;  // T1-A, T1-B, T1-C, T1-D, T2, MINCUT1, BRACKET
};

struct DofBracket {
  Rational lower;
  Rational upper;
  std::string lower_witness;                 // verified scheme summary
  std::vector<DofInequality> upper_witness;  // inequality set used by the LP
  std::array<Rational, 4> upper_vertex;
};

struct CaseCCheck {
  bool value = false;
  bool single_cross_path = false;  // exactly one s1->d2 path or one s2->d1
  bool contiguous_zs = false;      // Z letters contiguous and S letters too
  std::string reason;
};

// Canonical words only (throws PatternError otherwise), L >= 2.
CaseCCheck is_case_c(const PatternString& word);

// Canonical word -> exact value per the table above.  Throws PatternError on
// non-canonical input.
DofValue classify_two_relay(const PatternString& word);

struct ClassifyResult {
  std::optional<PatternString> word;  // two-relay networks only
  DofValue value;                     // provenance BRACKET => see bracket
  std::optional<DofBracket> bracket;
  int min_cut = 0;
  std::string detail;  // which dispatch arm fired / case reason
};

// Dispatch: (i) min-cut <= 1, (ii) two-relay word table, (iii) five-thirds
// isomorphism, (iv) bracket from scheme lower bound + LP upper bound.  The
// seed drives the scheme-synthesis attempts for (iv)'s lower bound.
ClassifyResult classify_general(const LayeredNetwork& net,
                                uint64_t seed = 20260823u);

// True iff `net` is the five-thirds topology up to within-layer relabeling.
bool is_five_thirds_topology(const LayeredNetwork& net);

}  // namespace xnet
