#pragma once
//==============================================================================
// AWGN Monte-Carlo rate simulation.
//
// For each trial, a fresh channel realization is drawn and the scheme is
// re-synthesized against it (beamforming directions are solutions of
// realization-specific alignment equations, so they cannot be reused across
// draws).  Achievable rates use the Gaussian log-det formula with residual
// interference treated as noise; amplify-and-forward relays propagate their
// accumulated noise, decode-and-forward relays re-inject only fresh unit
// noise downstream.  Transmit powers are normalized per layer so that the
// loudest node in each layer meets the average power constraint -- per-node
// scaling would break cross-node cancellation identities.
//==============================================================================

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "xnet/network.hpp"
#include "xnet/scheme.hpp"

namespace xnet {

struct RatePoint {
  double snr_db = 0.0;
  double sum_rate = 0.0;                  // bits per channel use, trial mean
  std::array<double, 4> per_message{};    // W11, W12, W21, W22
  int trials = 0;
  uint64_t seed = 0;
};

// Mean achievable rates at one SNR over `trials` independent draws.
// Throws if a draw fails scheme verification even after the automatic
// redraw, or on an invalid configuration.
RatePoint simulate_rate(const LayeredNetwork& net, const SchemeSpec& spec,
                        double snr_db, int trials, uint64_t seed);

struct SlopeEstimate {
  double dof_hat = 0.0;
  double stderr_slope = 0.0;            // OLS standard error of the slope
  double residual = 0.0;                // RMS regression residual (bits)
  std::array<double, 4> per_message{};  // per-message slopes
  std::vector<RatePoint> points;
  int trials = 0;
  uint64_t seed = 0;
};

// Least-squares slope of sum rate versus log2(SNR) over the grid (dB).
// Requires >= 2 points spanning >= 30 dB inside [40, 100] dB; throws
// std::invalid_argument otherwise ("grid too narrow").
SlopeEstimate estimate_dof(const LayeredNetwork& net, const SchemeSpec& spec,
                           const std::vector<double>& snr_grid_db, int trials,
                           uint64_t seed);

// Expands "lo:hi:step" in dB.  Throws std::invalid_argument on bad syntax.
std::vector<double> parse_snr_grid(const std::string& text);

}  // namespace xnet
