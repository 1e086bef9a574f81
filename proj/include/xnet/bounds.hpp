#pragma once
//==============================================================================
// DoF outer bounds.
//
// Inequalities over (d11, d12, d21, d22) generated from network structure:
//   SINGLE_ANTENNA  each terminal has one antenna: the two messages sharing
//                   a source (or a sink) carry at most 1 DoF together.
//   DECODE_CHAIN    a gateway node through which all of one sink's traffic
//                   flows over an interference-free tail can, after nulling
//                   one message, decode a third message by subtraction; any
//                   >= 3 messages decodable at one single-antenna node share
//                   1 DoF.  Implemented as a reconstruction closure.
//   GENIE_CERT      registered certificate templates (currently the
//                   [2,3,3,2] five-thirds topology) matched by exact
//                   isomorphism; premise checks are re-asserted on match.
//
// max_sum_dof maximizes d11+d12+d21+d22 exactly by rational vertex
// enumeration (all square subsystems of the constraint set, nonnegativity
// included).  Messages with no directed path can be eliminated as variables
// via the `absent` mask -- forcing d_mn = 0 without violating the rhs > 0
// invariant on inequalities.
//==============================================================================

#include <array>
#include <string>
#include <vector>

#include "xnet/network.hpp"
#include "xnet/rational.hpp"

namespace xnet {

struct DofInequality {
  // Order: (a11, a12, a21, a22); all nonnegative, not all zero.
  std::array<Rational, 4> coeffs;
  Rational rhs;            // > 0
  std::string rule;        // SINGLE_ANTENNA | DECODE_CHAIN | GENIE_CERT
  std::string justification;
};

std::vector<DofInequality> single_antenna_bounds();
std::vector<DofInequality> decode_chain_bounds(const LayeredNetwork& net);
std::vector<DofInequality> genie_bounds(const LayeredNetwork& net);

struct LpResult {
  Rational optimum;
  std::array<Rational, 4> vertex;  // an optimal point (eliminated vars = 0)
};

// Exact maximum of d11+d12+d21+d22 subject to the inequalities, d >= 0, and
// d_mn = 0 wherever absent[.] is true.  Throws std::runtime_error if the
// feasible set is unbounded (cannot happen once the single-antenna family is
// included).  Index order: 0->d11, 1->d12, 2->d21, 3->d22.
LpResult max_sum_dof(const std::vector<DofInequality>& inequalities,
                     const std::array<bool, 4>& absent = {false, false, false,
                                                          false});

// absent[k] = true iff the k-th message's source->sink path count is zero.
std::array<bool, 4> absent_messages(const LayeredNetwork& net);

struct BoundReport {
  std::vector<DofInequality> inequalities;
  std::array<bool, 4> absent;
  LpResult lp;
};

// All generators + LP, with absent-message elimination.
BoundReport outer_bound(const LayeredNetwork& net);

}  // namespace xnet
