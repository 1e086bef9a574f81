#pragma once
//==============================================================================
// Linear transmission schemes over T-symbol extensions.
//
// A scheme sends complex data streams along unit-norm T-slot beamforming
// directions.  Relays either decode-and-forward (demodulate groups of
// aligned streams, re-transmit chosen combinations on new directions) or
// amplify-and-forward (per-slot diagonal gain).  Verification checks the
// realized end-to-end columns: demodulation groups must be resolvable
// (parallel within a group, independent across groups), sink desired columns
// must stay independent of residual interference, and neutralized transfers
// must vanish.
//
// Builders take an explicit ChannelRealization and throw DegenerateDrawError
// on measure-zero bad draws; synthesize_with_retry adds the one automatic
// redraw the almost-sure analysis allows.
//==============================================================================

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "xnet/network.hpp"
#include "xnet/rational.hpp"

namespace xnet {

struct MessageId {
  int m = 0;  // source, 0-based
  int n = 0;  // sink, 0-based
  friend bool operator==(const MessageId&, const MessageId&) = default;
  friend auto operator<=>(const MessageId&, const MessageId&) = default;
};
inline std::string message_name(MessageId w) {
  return "W" + std::to_string(w.m + 1) + std::to_string(w.n + 1);
}

struct ChannelRealization {
  int T = 1;
  // coeff[e][t]: coefficient of network edge e (same order as net.edges) in
  // slot t.  All entries nonzero.
  std::vector<std::vector<std::complex<double>>> coeff;
};

// Slot-t coefficients honor pinned per-edge values from the network file
// (constant across slots); unpinned edges draw i.i.d. standard circular
// complex Gaussians per slot.
ChannelRealization draw_channel(const LayeredNetwork& net, int T,
                                std::mt19937_64& rng);

struct Stream {
  std::string name;  // "x11", "x12(2)", ...
  MessageId message;
  Eigen::VectorXcd direction;  // length T, unit norm, used at the source
};

struct DemodGroup {
  std::vector<int> stream_ids;  // streams whose columns align at this relay
};

struct ForwardEntry {
  Eigen::VectorXcd direction;  // length T, unit norm
  // Forwarded symbol = sum combo[k].second * stream combo[k].first.  The
  // combination must be proportional to a demodulation group's realized
  // coefficient vector (checked by verify_scheme).
  std::vector<std::pair<int, std::complex<double>>> combo;
};

struct RelayOp {
  NodeRef node;
  enum class Kind { DecodeForward, AmplifyForward } kind =
      Kind::DecodeForward;
  std::vector<DemodGroup> groups;       // DecodeForward
  std::vector<ForwardEntry> forwards;   // DecodeForward
  Eigen::VectorXcd af_gain;             // AmplifyForward, length T
};

struct LinearScheme {
  int T = 1;
  std::vector<Stream> streams;
  std::vector<RelayOp> relay_ops;            // one per relay node
  std::vector<std::vector<int>> desired;     // per sink: stream ids to decode
};

class DegenerateDrawError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class SchemeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- builders ---------------------------------------------------------------

// Single stream routed along one source->sink path, T=1.  Deterministic path
// choice: first message (row-major W11..W22) with a path, lexicographic
// smallest node sequence.
LinearScheme build_scheme_tdma(const LayeredNetwork& net,
                               const ChannelRealization& ch);

// Aligned interference neutralization on the canonical XZ^(L-1) word, T=2,
// sum DoF 3/2.  Layers 2..L-1 amplify-and-forward.
LinearScheme build_scheme_xz(const LayeredNetwork& net,
                             const ChannelRealization& ch);

// Classic one-hop fully-connected alignment, T=3, sum DoF 4/3.
LinearScheme build_scheme_x_single_hop(const LayeredNetwork& net,
                                       const ChannelRealization& ch);

// Interference neutralization with scalar relay gains, T=1, sum DoF 2.
// `kept` must name two messages with distinct sources and distinct sinks;
// both cross transfers are tuned to exactly zero.  Throws SchemeError when a
// cross pair has exactly one path or the gain algebra is unsolvable.
LinearScheme build_scheme_neutralize(const LayeredNetwork& net,
                                     std::array<MessageId, 2> kept,
                                     const ChannelRealization& ch);

// The [2,3,3,2] five-thirds topology, T=3, sum DoF 5/3.  Accepts any
// within-layer relabeling of the reference network.
LinearScheme build_scheme_5over3(const LayeredNetwork& net,
                                 const ChannelRealization& ch);

// --- evaluation -------------------------------------------------------------

// Noiseless stream response at each sink: entry [n] is T x (#streams);
// column k is sink n's response to stream k.  DecodeForward relays regenerate
// their forwarded combinations exactly (validity is verify_scheme's job).
std::vector<Eigen::MatrixXcd> end_to_end_transfer(const LayeredNetwork& net,
                                                  const ChannelRealization& ch,
                                                  const LinearScheme& scheme);

struct CheckEntry {
  std::string node;
  std::string kind;  // "demod_rank", "forward_combo", "desired_rank",
                     // "interference_residual", "neutralize_zero", ...
  bool ok = true;
  std::string detail;
};

struct VerificationReport {
  bool passed = false;
  Rational sum_dof;                  // decoded desired streams / T, summed
  double max_residual = 0.0;         // worst relative residual seen
  std::vector<CheckEntry> checks;
};

VerificationReport verify_scheme(const LayeredNetwork& net,
                                 const ChannelRealization& ch,
                                 const LinearScheme& scheme,
                                 double rank_tol = 1e-8,
                                 double residual_tol = 1e-10);

// --- drivers ----------------------------------------------------------------

enum class SchemeKind { Tdma, XzFamily, XSingleHop, Neutralize, FiveThirds };

std::string scheme_kind_name(SchemeKind kind);

struct SchemeSpec {
  SchemeKind kind = SchemeKind::Tdma;
  std::array<MessageId, 2> kept{};  // Neutralize only
};

int scheme_extension_length(SchemeKind kind);  // T per builder

struct SynthesisOutcome {
  LinearScheme scheme;
  ChannelRealization channels;
  VerificationReport report;
  int redraws = 0;  // 0 or 1
};

// Draw -> build -> verify; one automatic redraw on DegenerateDrawError or a
// failed report, then DegenerateDrawError.  Structural SchemeErrors are not
// retried.
SynthesisOutcome synthesize_with_retry(const LayeredNetwork& net,
                                       const SchemeSpec& spec, uint64_t seed);

}  // namespace xnet
