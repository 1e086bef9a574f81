#pragma once
//==============================================================================
// Signal propagation through a layered network (internal helper).
//
// Tracks, per node, the linear maps from stream symbols (and optionally from
// injected unit-variance noise sources) to the node's reception and
// transmission over the T-slot extension.  Decode-forward relays regenerate
// stream combinations exactly (no noise carry-over); amplify-forward relays
// scale their whole reception, noise included.
//==============================================================================

#include <Eigen/Dense>

#include <vector>

#include "xnet/network.hpp"
#include "xnet/scheme.hpp"

namespace xnet {

// Per-slot diagonal channel of edge e as a T-vector.
class ChannelView {
 public:
  ChannelView(const LayeredNetwork& net, const ChannelRealization& ch);
  // Slot coefficients for edge (hop, tx, rx); throws SchemeError if absent.
  const std::vector<std::complex<double>>& slots(int hop, int tx,
                                                 int rx) const;
  bool has(int hop, int tx, int rx) const;
  int extension() const { return T_; }

 private:
  const LayeredNetwork* net_;
  const ChannelRealization* ch_;
  int T_;
  std::vector<std::vector<int>> index_;  // [hop] flattened tx*width+rx -> edge
};

struct NodeSignal {
  Eigen::MatrixXcd streams;  // T x (#streams)
  Eigen::MatrixXcd noise;    // T x (#noise sources), may be 0 columns
};

struct Propagation {
  // rx[l][i] is defined for l >= 1 (receptions), tx[l][i] for l <= L-1.
  std::vector<std::vector<NodeSignal>> rx;
  std::vector<std::vector<NodeSignal>> tx;
  // Worst aggregated path-gain magnitude (cancellation ignored): reference
  // scale for residual tolerances.
  double gross_scale = 1.0;
};

// with_noise adds one fresh unit-noise source per reception slot (sinks and
// relays); layer_scale, when given, multiplies every transmission of layer l
// by layer_scale[l] (power normalization; length L).
Propagation propagate(const LayeredNetwork& net, const ChannelRealization& ch,
                      const LinearScheme& scheme, bool with_noise,
                      const std::vector<double>* layer_scale = nullptr);

}  // namespace xnet
