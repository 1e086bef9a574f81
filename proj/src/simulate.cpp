#include "xnet/simulate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "xnet/propagate.hpp"

namespace xnet {

namespace {

using Cx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

double log2det_hermitian(const Mat& K) {
  Eigen::LLT<Mat> llt(K);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("covariance not positive definite");
  double acc = 0.0;
  Mat Lm = llt.matrixL();
  for (int i = 0; i < Lm.rows(); ++i) acc += std::log2(std::norm(Lm(i, i)));
  return acc;
}

struct SinkObservation {
  Mat streams;  // T x S, power-scaled columns
  Mat noise;    // T x K, includes the sink's own unit noise
};

// Physical propagation: stream columns carry sqrt(power), every reception
// adds fresh unit noise, amplify-and-forward relays carry noise downstream,
// and each layer is scaled so its loudest node meets the average power
// constraint P per slot (one common factor per layer keeps cross-node
// cancellations intact).
std::vector<SinkObservation> propagate_physical(const LayeredNetwork& net,
                                                const ChannelRealization& ch,
                                                const LinearScheme& scheme,
                                                double power) {
  ChannelView cv(net, ch);
  const int T = scheme.T;
  const int L = net.hop_count();
  const int S = static_cast<int>(scheme.streams.size());

  std::vector<const RelayOp*> op_of;  // flattened (layer,index) lookup
  std::vector<int> base(L + 1, 0);
  for (int l = 1; l <= L; ++l) base[l] = base[l - 1] + net.layers[l - 1];
  op_of.assign(base[L] + net.layers[L], nullptr);
  for (const RelayOp& op : scheme.relay_ops)
    op_of[base[op.node.layer] + op.node.index] = &op;

  std::vector<int> streams_at(net.layers[0], 0);
  for (const Stream& st : scheme.streams) ++streams_at[st.message.m];

  std::vector<Mat> X(net.layers[0]), Xn(net.layers[0]);
  for (int i = 0; i < net.layers[0]; ++i) {
    X[i] = Mat::Zero(T, S);
    Xn[i] = Mat::Zero(T, 0);
    for (int s = 0; s < S; ++s)
      if (scheme.streams[s].message.m == i)
        X[i].col(s) = scheme.streams[s].direction *
                      std::sqrt(power * T / streams_at[i]);
  }

  int next_noise = 0;
  std::vector<SinkObservation> sinks(net.layers[L]);
  for (int l = 1; l <= L; ++l) {
    std::vector<Mat> R(net.layers[l]), Rn(net.layers[l]);
    for (int j = 0; j < net.layers[l]; ++j) {
      R[j] = Mat::Zero(T, S);
      Rn[j] = Mat::Zero(T, next_noise);
      for (int i : net.tx_neighbors(l - 1, j)) {
        Vec h(T);
        const auto& slots = cv.slots(l - 1, i, j);
        for (int t = 0; t < T; ++t) h(t) = slots[t];
        R[j] += h.asDiagonal() * X[i];
        if (Xn[i].cols() > 0)
          Rn[j].leftCols(Xn[i].cols()) += h.asDiagonal() * Xn[i];
      }
    }
    // Fresh unit noise at every receiver of this layer, one column block per
    // node so the ids stay distinct.
    int off = next_noise;
    next_noise += T * net.layers[l];
    for (int j = 0; j < net.layers[l]; ++j) {
      Mat fixed = Mat::Zero(T, next_noise);
      fixed.leftCols(off) = Rn[j];
      fixed.middleCols(off + T * j, T) = Mat::Identity(T, T);
      Rn[j] = std::move(fixed);
    }
    if (l == L) {
      for (int j = 0; j < net.layers[L]; ++j)
        sinks[j] = {R[j], Rn[j]};
      break;
    }
    std::vector<Mat> Xl(net.layers[l]), Xln(net.layers[l]);
    double emax = 0.0;
    for (int j = 0; j < net.layers[l]; ++j) {
      const RelayOp* op = op_of[base[l] + j];
      if (op == nullptr)
        throw SchemeError("missing relay operation for " +
                          net.node_name({l, j}));
      if (op->kind == RelayOp::Kind::AmplifyForward) {
        Xl[j] = op->af_gain.asDiagonal() * R[j];
        Xln[j] = op->af_gain.asDiagonal() * Rn[j];
      } else {
        Xl[j] = Mat::Zero(T, S);
        Xln[j] = Mat::Zero(T, 0);
        for (const ForwardEntry& f : op->forwards)
          for (const auto& [sid, coeff] : f.combo) {
            // Re-transmitted symbols keep the source stream's power scale so
            // cancellation identities hold verbatim.
            double amp = std::sqrt(power * T /
                                   streams_at[scheme.streams[sid].message.m]);
            Xl[j].col(sid) += f.direction * (coeff * amp);
          }
      }
      emax = std::max(emax, Xl[j].squaredNorm() + Xln[j].squaredNorm());
    }
    double alpha = emax > 0 ? std::sqrt(power * T / emax) : 1.0;
    X.resize(net.layers[l]);
    Xn.resize(net.layers[l]);
    for (int j = 0; j < net.layers[l]; ++j) {
      X[j] = Xl[j] * alpha;
      Xn[j] = Xln[j] * alpha;
    }
  }
  return sinks;
}

}  // namespace

RatePoint simulate_rate(const LayeredNetwork& net, const SchemeSpec& spec,
                        double snr_db, int trials, uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  const double power = std::pow(10.0, snr_db / 10.0);
  std::mt19937_64 master(seed ^ 0x9e3779b97f4a7c15ull);

  RatePoint pt;
  pt.snr_db = snr_db;
  pt.trials = trials;
  pt.seed = seed;
  for (int tr = 0; tr < trials; ++tr) {
    SynthesisOutcome outcome = synthesize_with_retry(net, spec, master());
    const LinearScheme& scheme = outcome.scheme;
    std::vector<SinkObservation> obs =
        propagate_physical(net, outcome.channels, scheme, power);

    const int T = scheme.T;
    for (int n = 0; n < net.num_sinks(); ++n) {
      const auto& desired = scheme.desired[n];
      if (desired.empty()) continue;
      std::vector<char> is_desired(scheme.streams.size(), 0);
      for (int s : desired) is_desired[s] = 1;
      Mat K = obs[n].noise * obs[n].noise.adjoint();
      for (size_t s = 0; s < scheme.streams.size(); ++s)
        if (!is_desired[s])
          K += obs[n].streams.col(s) * obs[n].streams.col(s).adjoint();
      // Chain rule over messages in the fixed order W11, W12, W21, W22:
      // each message's rate treats later messages' streams as not yet
      // decoded.
      double prev = log2det_hermitian(K);
      for (int msg = 3; msg >= 0; --msg) {
        Mat Kp = K;
        bool any = false;
        for (int s : desired) {
          const MessageId w = scheme.streams[s].message;
          if (w.m * 2 + w.n >= msg) {
            Kp += obs[n].streams.col(s) * obs[n].streams.col(s).adjoint();
            if (w.m * 2 + w.n == msg) any = true;
          }
        }
        double cur = log2det_hermitian(Kp);
        if (any) pt.per_message[msg] += (cur - prev) / T / trials;
        prev = cur;
      }
    }
  }
  pt.sum_rate =
      pt.per_message[0] + pt.per_message[1] + pt.per_message[2] +
      pt.per_message[3];
  return pt;
}

SlopeEstimate estimate_dof(const LayeredNetwork& net, const SchemeSpec& spec,
                           const std::vector<double>& snr_grid_db, int trials,
                           uint64_t seed) {
  if (snr_grid_db.size() < 2)
    throw std::invalid_argument("SNR grid too narrow: need at least 2 points");
  auto [lo, hi] = std::minmax_element(snr_grid_db.begin(), snr_grid_db.end());
  if (*lo < 40.0 - 1e-9 || *hi > 100.0 + 1e-9)
    throw std::invalid_argument(
        "SNR grid outside the validated 40..100 dB window");
  if (*hi - *lo < 30.0 - 1e-9)
    throw std::invalid_argument("SNR grid too narrow: needs >= 30 dB span");

  SlopeEstimate est;
  est.trials = trials;
  est.seed = seed;
  for (size_t k = 0; k < snr_grid_db.size(); ++k)
    est.points.push_back(
        simulate_rate(net, spec, snr_grid_db[k], trials, seed + k));

  const double log2_10 = std::log2(10.0);
  const int n = static_cast<int>(est.points.size());
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = est.points[i].snr_db / 10.0 * log2_10;
  double xbar = 0.0;
  for (double v : x) xbar += v / n;
  double sxx = 0.0;
  for (double v : x) sxx += (v - xbar) * (v - xbar);

  auto fit = [&](auto&& getter) {
    double ybar = 0.0;
    for (int i = 0; i < n; ++i) ybar += getter(est.points[i]) / n;
    double sxy = 0.0;
    for (int i = 0; i < n; ++i)
      sxy += (x[i] - xbar) * (getter(est.points[i]) - ybar);
    return std::pair<double, double>(sxy / sxx, ybar);
  };
  auto [slope, ybar] = fit([](const RatePoint& p) { return p.sum_rate; });
  est.dof_hat = slope;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    double pred = ybar + slope * (x[i] - xbar);
    ss += (est.points[i].sum_rate - pred) * (est.points[i].sum_rate - pred);
  }
  est.residual = std::sqrt(ss / n);
  est.stderr_slope = n > 2 ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
  for (int msg = 0; msg < 4; ++msg)
    est.per_message[msg] =
        fit([msg](const RatePoint& p) { return p.per_message[msg]; }).first;
  return est;
}

std::vector<double> parse_snr_grid(const std::string& text) {
  double lo = 0, hi = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
      !(in >> std::ws).eof())
    throw std::invalid_argument("bad SNR grid '" + text +
                                "', expected lo:hi:step");
  if (step <= 0 || hi < lo)
    throw std::invalid_argument("bad SNR grid '" + text +
                                "': need hi >= lo and step > 0");
  std::vector<double> grid;
  for (double v = lo; v <= hi + 1e-9; v += step) grid.push_back(v);
  return grid;
}

}  // namespace xnet
