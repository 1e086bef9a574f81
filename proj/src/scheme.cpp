#include "xnet/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <sstream>

#include "xnet/pattern.hpp"
#include "xnet/five_thirds.hpp"
#include "xnet/propagate.hpp"

namespace xnet {

namespace {

using Cx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

constexpr double kTiny = 1e-300;

// Deterministic internal randomness tied to the channel draw, so a builder's
// auxiliary direction choices are reproducible from (network, channels) alone.
std::mt19937_64 rng_from_channels(const ChannelRealization& ch) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](double v) {
    uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    h ^= bits;
    h *= 1099511628211ull;
  };
  mix(static_cast<double>(ch.T));
  for (const auto& e : ch.coeff)
    for (const auto& c : e) {
      mix(c.real());
      mix(c.imag());
    }
  return std::mt19937_64(h);
}

Cx draw_cx(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(2.0));
  return Cx(g(rng), g(rng));
}

Vec random_unit(int T, std::mt19937_64& rng) {
  while (true) {
    Vec v(T);
    for (int t = 0; t < T; ++t) v(t) = draw_cx(rng);
    double n = v.norm();
    if (n > 1e-6) return v / n;
  }
}

Vec unit_or_throw(const Vec& v, const char* what) {
  double n = v.norm();
  if (!(n > 1e-12))
    throw DegenerateDrawError(std::string("degenerate draw: ") + what +
                              " collapsed to zero");
  return v / n;
}

Vec slots_vec(const ChannelView& cv, int hop, int tx, int rx) {
  const auto& s = cv.slots(hop, tx, rx);
  Vec v(static_cast<int>(s.size()));
  for (size_t t = 0; t < s.size(); ++t) v(static_cast<int>(t)) = s[t];
  return v;
}

// Elementwise quotient with a degeneracy guard on the divisor.
Vec diag_div(const Vec& num, const Vec& den, const char* what) {
  double scale = den.cwiseAbs().maxCoeff();
  for (int t = 0; t < den.size(); ++t)
    if (std::abs(den(t)) < 1e-9 * std::max(scale, 1e-30))
      throw DegenerateDrawError(std::string("degenerate draw: near-singular "
                                            "slot coefficient in ") +
                                what);
  return num.cwiseQuotient(den);
}

Vec diag_mul(const Vec& a, const Vec& b) { return a.cwiseProduct(b); }

void require_channel_shape(const LayeredNetwork& net,
                           const ChannelRealization& ch, int T,
                           const char* builder) {
  if (ch.T != T)
    throw SchemeError(std::string(builder) + ": requires extension T=" +
                      std::to_string(T) + ", got " + std::to_string(ch.T));
  if (ch.coeff.size() != net.edges.size())
    throw SchemeError(std::string(builder) +
                      ": channel realization does not match the edge list");
}

std::string stream_label(MessageId w, int copy) {
  std::string s = "x" + std::to_string(w.m + 1) + std::to_string(w.n + 1);
  if (copy > 0) s += "(" + std::to_string(copy) + ")";
  return s;
}

// Per-layer swap assignment mapping the network's hops onto a reference list
// of letter matrices.  Returns sigma with sigma[l] in {0,1}; reference index i
// at layer l lives at physical index (sigma[l] ? 1 - i : i).
std::optional<std::vector<int>> find_swap_match(
    const LayeredNetwork& net, const std::vector<HopMatrix>& reference) {
  int L = net.hop_count();
  if (static_cast<int>(reference.size()) != L) return std::nullopt;
  for (int l = 0; l <= L; ++l)
    if (net.layers[l] != 2) return std::nullopt;
  std::vector<HopMatrix> actual(L);
  for (int l = 0; l < L; ++l) {
    HopMatrix m{};
    for (const Edge& e : net.edges)
      if (e.hop == l) m[e.tx][e.rx] = 1;
    actual[l] = m;
  }
  for (unsigned mask = 0; mask < (1u << (L + 1)); ++mask) {
    bool ok = true;
    for (int l = 0; l < L && ok; ++l) {
      int si = (mask >> l) & 1, so = (mask >> (l + 1)) & 1;
      for (int i = 0; i < 2 && ok; ++i)
        for (int j = 0; j < 2; ++j)
          if (actual[l][si ? 1 - i : i][so ? 1 - j : j] != reference[l][i][j]) {
            ok = false;
            break;
          }
    }
    if (ok) {
      std::vector<int> sigma(L + 1);
      for (int l = 0; l <= L; ++l) sigma[l] = (mask >> l) & 1;
      return sigma;
    }
  }
  return std::nullopt;
}

}  // namespace

//=== ChannelView ==============================================================

ChannelView::ChannelView(const LayeredNetwork& net,
                         const ChannelRealization& ch)
    : net_(&net), ch_(&ch), T_(ch.T) {
  if (ch.coeff.size() != net.edges.size())
    throw SchemeError("channel realization does not match the edge list");
  for (const auto& per_edge : ch.coeff)
    if (static_cast<int>(per_edge.size()) != T_)
      throw SchemeError("channel realization has inconsistent slot counts");
  int L = net.hop_count();
  index_.assign(L, {});
  for (int l = 0; l < L; ++l)
    index_[l].assign(static_cast<size_t>(net.layers[l]) * net.layers[l + 1],
                     -1);
  for (size_t e = 0; e < net.edges.size(); ++e) {
    const Edge& ed = net.edges[e];
    index_[ed.hop][static_cast<size_t>(ed.tx) * net_->layers[ed.hop + 1] +
                   ed.rx] = static_cast<int>(e);
  }
}

bool ChannelView::has(int hop, int tx, int rx) const {
  return index_[hop][static_cast<size_t>(tx) * net_->layers[hop + 1] + rx] >=
         0;
}

const std::vector<std::complex<double>>& ChannelView::slots(int hop, int tx,
                                                            int rx) const {
  int e = index_[hop][static_cast<size_t>(tx) * net_->layers[hop + 1] + rx];
  if (e < 0)
    throw SchemeError("scheme references absent edge " +
                      net_->node_name({hop, tx}) + " -> " +
                      net_->node_name({hop + 1, rx}));
  return ch_->coeff[e];
}

//=== draw_channel =============================================================

ChannelRealization draw_channel(const LayeredNetwork& net, int T,
                                std::mt19937_64& rng) {
  if (T < 1) throw SchemeError("extension length must be positive");
  ChannelRealization ch;
  ch.T = T;
  ch.coeff.resize(net.edges.size());
  for (size_t e = 0; e < net.edges.size(); ++e) {
    ch.coeff[e].resize(T);
    if (net.edges[e].coeff) {
      for (int t = 0; t < T; ++t) ch.coeff[e][t] = *net.edges[e].coeff;
    } else {
      for (int t = 0; t < T; ++t) ch.coeff[e][t] = draw_cx(rng);
    }
  }
  return ch;
}

//=== propagate ================================================================

Propagation propagate(const LayeredNetwork& net, const ChannelRealization& ch,
                      const LinearScheme& scheme, bool with_noise,
                      const std::vector<double>* layer_scale) {
  ChannelView cv(net, ch);
  if (scheme.T != ch.T)
    throw SchemeError("scheme extension does not match channel realization");
  const int T = scheme.T;
  const int L = net.hop_count();
  const int S = static_cast<int>(scheme.streams.size());
  if (S == 0) throw SchemeError("scheme carries no streams");

  std::map<std::pair<int, int>, const RelayOp*> ops;
  for (const RelayOp& op : scheme.relay_ops) {
    if (op.node.layer < 1 || op.node.layer > L - 1 ||
        op.node.index >= net.layers[op.node.layer])
      throw SchemeError("relay operation attached to non-relay node " +
                        net.node_name(op.node));
    if (!ops.emplace(std::make_pair(op.node.layer, op.node.index), &op).second)
      throw SchemeError("duplicate relay operation for " +
                        net.node_name(op.node));
  }
  for (int l = 1; l < L; ++l)
    for (int i = 0; i < net.layers[l]; ++i)
      if (!ops.count({l, i}))
        throw SchemeError("missing relay operation for " +
                          net.node_name({l, i}));

  Propagation prop;
  prop.rx.assign(L + 1, {});
  prop.tx.assign(L, {});
  // Entrywise-absolute shadow propagation; its max entry bounds the largest
  // aggregated path gain and anchors all relative tolerances.
  std::vector<std::vector<Eigen::MatrixXd>> tx_abs(L);
  double gross = 0.0;
  int next_noise = 0;
  auto scale_of = [&](int l) {
    return layer_scale ? (*layer_scale)[l] : 1.0;
  };

  // Layer 0: sources transmit their own streams.
  prop.tx[0].resize(net.layers[0]);
  tx_abs[0].resize(net.layers[0]);
  for (int i = 0; i < net.layers[0]; ++i) {
    Mat X = Mat::Zero(T, S);
    for (int s = 0; s < S; ++s) {
      const Stream& st = scheme.streams[s];
      if (st.message.m == i) {
        if (st.direction.size() != T)
          throw SchemeError("stream " + st.name +
                            " direction length does not match extension");
        X.col(s) = st.direction;
      }
    }
    X *= scale_of(0);
    prop.tx[0][i] = {X, Mat::Zero(T, 0)};
    tx_abs[0][i] = X.cwiseAbs();
  }

  for (int l = 1; l <= L; ++l) {
    prop.rx[l].resize(net.layers[l]);
    if (l < L) {
      prop.tx[l].resize(net.layers[l]);
      tx_abs[l].resize(net.layers[l]);
    }
    for (int j = 0; j < net.layers[l]; ++j) {
      Mat R = Mat::Zero(T, S);
      Eigen::MatrixXd Rabs = Eigen::MatrixXd::Zero(T, S);
      Mat N = Mat::Zero(T, next_noise);
      for (int i : net.tx_neighbors(l - 1, j)) {
        Vec h = slots_vec(cv, l - 1, i, j);
        const NodeSignal& up = prop.tx[l - 1][i];
        R += h.asDiagonal() * up.streams;
        Rabs += h.cwiseAbs().asDiagonal() * tx_abs[l - 1][i];
        if (up.noise.cols() > 0) {
          if (up.noise.cols() > N.cols()) {
            Mat padded = Mat::Zero(T, up.noise.cols());
            padded.leftCols(N.cols()) = N;
            N = std::move(padded);
          }
          N.leftCols(up.noise.cols()) += h.asDiagonal() * up.noise;
        }
      }
      gross = std::max(gross, Rabs.maxCoeff());
      if (with_noise) {
        Mat widened = Mat::Zero(T, next_noise + T);
        widened.leftCols(N.cols()) = N;
        widened.rightCols(T) = Mat::Identity(T, T);
        N = std::move(widened);
        next_noise += T;
      }
      prop.rx[l][j] = {R, N};
      if (l == L) continue;

      const RelayOp& op = *ops.at({l, j});
      Mat X;
      Mat Xn = Mat::Zero(T, prop.rx[l][j].noise.cols());
      Eigen::MatrixXd Xabs;
      if (op.kind == RelayOp::Kind::AmplifyForward) {
        if (op.af_gain.size() != T)
          throw SchemeError("amplify-forward gain length mismatch at " +
                            net.node_name(op.node));
        X = op.af_gain.asDiagonal() * R;
        Xn = op.af_gain.asDiagonal() * prop.rx[l][j].noise;
        Xabs = op.af_gain.cwiseAbs().asDiagonal() * Rabs;
      } else {
        X = Mat::Zero(T, S);
        Xabs = Eigen::MatrixXd::Zero(T, S);
        for (const ForwardEntry& f : op.forwards) {
          if (f.direction.size() != T)
            throw SchemeError("forward direction length mismatch at " +
                              net.node_name(op.node));
          for (const auto& [sid, coeff] : f.combo) {
            if (sid < 0 || sid >= S)
              throw SchemeError("forward references unknown stream at " +
                                net.node_name(op.node));
            X.col(sid) += f.direction * coeff;
            Xabs.col(sid) += f.direction.cwiseAbs() * std::abs(coeff);
          }
        }
        Xn.setZero();  // decode-forward regenerates noiselessly
      }
      X *= scale_of(l);
      Xn *= scale_of(l);
      Xabs *= scale_of(l);
      prop.tx[l][j] = {std::move(X), std::move(Xn)};
      tx_abs[l][j] = std::move(Xabs);
    }
  }
  prop.gross_scale = std::max(gross, 1e-30);
  return prop;
}

//=== TDMA =====================================================================

LinearScheme build_scheme_tdma(const LayeredNetwork& net,
                               const ChannelRealization& ch) {
  require_channel_shape(net, ch, 1, "build_scheme_tdma");
  const int L = net.hop_count();
  int pick_m = -1, pick_n = -1;
  for (int m = 0; m < net.num_sources() && pick_m < 0; ++m)
    for (int n = 0; n < net.num_sinks(); ++n)
      if (net.path_count(m, n) > 0) {
        pick_m = m;
        pick_n = n;
        break;
      }
  if (pick_m < 0)
    throw SchemeError("build_scheme_tdma: no source-sink path exists");

  // Backward reachability to the chosen sink, then a greedy lexicographic
  // walk through it.
  std::vector<std::vector<char>> reaches(L + 1);
  for (int l = 0; l <= L; ++l) reaches[l].assign(net.layers[l], 0);
  reaches[L][pick_n] = 1;
  for (int l = L - 1; l >= 0; --l)
    for (const Edge& e : net.edges)
      if (e.hop == l && reaches[l + 1][e.rx]) reaches[l][e.tx] = 1;

  std::vector<NodeRef> path{{0, pick_m}};
  for (int l = 0; l < L; ++l) {
    int cur = path.back().index, nxt = -1;
    for (int j = 0; j < net.layers[l + 1]; ++j)
      if (net.has_edge(l, cur, j) && reaches[l + 1][j]) {
        nxt = j;
        break;
      }
    if (nxt < 0)
      throw SchemeError("build_scheme_tdma: path search failed");
    path.push_back({l + 1, nxt});
  }

  LinearScheme scheme;
  scheme.T = 1;
  Vec one(1);
  one(0) = 1.0;
  scheme.streams.push_back(
      {stream_label({pick_m, pick_n}, 0), {pick_m, pick_n}, one});
  for (int l = 1; l < L; ++l)
    for (int i = 0; i < net.layers[l]; ++i) {
      RelayOp op;
      op.node = {l, i};
      op.kind = RelayOp::Kind::DecodeForward;
      if (path[l].index == i) {
        op.groups.push_back({{0}});
        op.forwards.push_back({one, {{0, Cx(1.0, 0.0)}}});
      }
      scheme.relay_ops.push_back(std::move(op));
    }
  scheme.desired.assign(net.num_sinks(), {});
  scheme.desired[pick_n] = {0};
  return scheme;
}

//=== XZ^(L-1) =================================================================

LinearScheme build_scheme_xz(const LayeredNetwork& net,
                             const ChannelRealization& ch) {
  require_channel_shape(net, ch, 2, "build_scheme_xz");
  const int L = net.hop_count();
  if (L < 2)
    throw SchemeError("build_scheme_xz: needs at least two hops");
  std::vector<HopMatrix> reference(L);
  reference[0] = letter_matrix('X');
  for (int l = 1; l < L; ++l) reference[l] = letter_matrix('Z');
  auto sigma_opt = find_swap_match(net, reference);
  if (!sigma_opt)
    throw SchemeError(
        "build_scheme_xz: network is not an XZ^(L-1) pattern up to "
        "within-layer relabeling");
  const std::vector<int>& sigma = *sigma_opt;
  auto phys = [&](int l, int i) { return sigma[l] ? 1 - i : i; };

  ChannelView cv(net, ch);
  auto H = [&](int l, int i_ref, int j_ref) {
    return slots_vec(cv, l, phys(l, i_ref), phys(l + 1, j_ref));
  };
  std::mt19937_64 rng = rng_from_channels(ch);

  // Reference orientation: hop 0 is X, hops 1.. are Z = [[1,1],[0,1]], so
  // sink 0 hears relay 0 only while sink 1 hears both relay chains.
  Vec c22 = random_unit(2, rng);
  Vec c12_raw = diag_div(diag_mul(H(0, 1, 0), c22), H(0, 0, 0),
                         "alignment at first relay");
  Vec c11_raw = diag_div(diag_mul(H(0, 1, 1), c22), H(0, 0, 1),
                         "alignment at second relay");
  Vec c12 = unit_or_throw(c12_raw, "aligned direction");
  Vec c11 = unit_or_throw(c11_raw, "aligned direction");
  double kappa = 1.0 / c12_raw.norm();  // x12 coefficient inside its group
  double nu = 1.0 / c11_raw.norm();     // x11 coefficient inside its group

  // Effective diagonal transfer from layer-1 nodes to the sinks through the
  // amplify-and-forward middle layers (unit gains).
  std::array<std::array<Vec, 2>, 2> eff;
  for (int start = 0; start < 2; ++start) {
    std::array<Vec, 2> cur = {Vec::Zero(2), Vec::Zero(2)};
    cur[start] = Vec::Ones(2);
    for (int l = 1; l < L; ++l) {
      std::array<Vec, 2> nxt = {Vec::Zero(2), Vec::Zero(2)};
      // Z hop: ref tx 0 -> rx {0,1}; ref tx 1 -> rx {1}.
      nxt[0] += diag_mul(H(l, 0, 0), cur[0]);
      nxt[1] += diag_mul(H(l, 0, 1), cur[0]);
      nxt[1] += diag_mul(H(l, 1, 1), cur[1]);
      cur = nxt;
    }
    eff[start] = cur;
  }

  Vec u_a = random_unit(2, rng);
  Vec u_b = random_unit(2, rng);
  // Cancel the x11 column at sink 1: relay 0 transmits x11 against the copy
  // arriving through relay 1's merged symbol.
  Vec w_raw = -nu * diag_div(diag_mul(eff[1][1], u_b), eff[0][1],
                             "cancellation direction");
  double w_scale = w_raw.norm();
  Vec w = unit_or_throw(w_raw, "cancellation direction");

  LinearScheme scheme;
  scheme.T = 2;
  MessageId w11{phys(0, 0), phys(L, 0)};
  MessageId w12{phys(0, 0), phys(L, 1)};
  MessageId w22{phys(0, 1), phys(L, 1)};
  scheme.streams.push_back({stream_label(w11, 0), w11, c11});
  scheme.streams.push_back({stream_label(w12, 0), w12, c12});
  scheme.streams.push_back({stream_label(w22, 0), w22, c22});

  {  // Relay ref 0: demodulates x11 and the aligned {x12,x22}; forwards x11.
    RelayOp op;
    op.node = {1, phys(1, 0)};
    op.groups = {{{0}}, {{1, 2}}};
    op.forwards.push_back({w, {{0, Cx(w_scale, 0.0)}}});
    scheme.relay_ops.push_back(std::move(op));
  }
  {  // Relay ref 1: demodulates x12 and the aligned {x11,x22}; forwards both.
    RelayOp op;
    op.node = {1, phys(1, 1)};
    op.groups = {{{1}}, {{0, 2}}};
    op.forwards.push_back({u_a, {{1, Cx(kappa, 0.0)}}});
    op.forwards.push_back({u_b, {{0, Cx(nu, 0.0)}, {2, Cx(1.0, 0.0)}}});
    scheme.relay_ops.push_back(std::move(op));
  }
  for (int l = 2; l < L; ++l)
    for (int i = 0; i < 2; ++i) {
      RelayOp op;
      op.node = {l, i};
      op.kind = RelayOp::Kind::AmplifyForward;
      op.af_gain = Vec::Ones(2);
      scheme.relay_ops.push_back(std::move(op));
    }
  scheme.desired.assign(2, {});
  scheme.desired[phys(L, 0)] = {0};
  scheme.desired[phys(L, 1)] = {1, 2};
  return scheme;
}

//=== single-hop X =============================================================

LinearScheme build_scheme_x_single_hop(const LayeredNetwork& net,
                                       const ChannelRealization& ch) {
  require_channel_shape(net, ch, 3, "build_scheme_x_single_hop");
  if (net.hop_count() != 1 || net.layers[0] != 2 || net.layers[1] != 2 ||
      net.edges.size() != 4)
    throw SchemeError(
        "build_scheme_x_single_hop: needs the fully connected single-hop "
        "network");
  ChannelView cv(net, ch);
  auto H = [&](int n, int m) { return slots_vec(cv, 0, m, n); };
  std::mt19937_64 rng = rng_from_channels(ch);

  Vec c11 = random_unit(3, rng);
  Vec c12 = random_unit(3, rng);
  // Align both interference streams at each sink into one dimension.
  Vec c21 = unit_or_throw(
      diag_div(diag_mul(H(1, 0), c11), H(1, 1), "alignment at sink 2"),
      "aligned direction");
  Vec c22 = unit_or_throw(
      diag_div(diag_mul(H(0, 0), c12), H(0, 1), "alignment at sink 1"),
      "aligned direction");

  LinearScheme scheme;
  scheme.T = 3;
  scheme.streams.push_back({"x11", {0, 0}, c11});
  scheme.streams.push_back({"x12", {0, 1}, c12});
  scheme.streams.push_back({"x21", {1, 0}, c21});
  scheme.streams.push_back({"x22", {1, 1}, c22});
  scheme.desired = {{0, 2}, {1, 3}};

  // Measure-zero guard: with degenerate draws (e.g. equal-slot coefficients
  // on every edge) the desired columns collapse onto the interference line.
  for (int n = 0; n < 2; ++n) {
    Mat M(3, 3);
    M.col(0) = diag_mul(H(n, 0), scheme.streams[n == 0 ? 0 : 1].direction);
    M.col(1) = diag_mul(H(n, 1), scheme.streams[n == 0 ? 2 : 3].direction);
    M.col(2) = diag_mul(H(n, 0), scheme.streams[n == 0 ? 1 : 0].direction);
    Eigen::JacobiSVD<Mat> svd(M);
    double smax = svd.singularValues()(0);
    double smin = svd.singularValues()(2);
    if (!(smin > 1e-10 * std::max(smax, kTiny)))
      throw DegenerateDrawError(
          "degenerate draw: alignment collapsed the decodable space at sink " +
          std::to_string(n + 1));
  }
  return scheme;
}

//=== scalar interference neutralization ======================================

namespace {

struct NeutralizeDp {
  // r[l][i]: reception at node (l,i) from source m (gains applied strictly
  // upstream); value at sinks equals the end-to-end transfer.
  std::vector<std::vector<Cx>> r;
};

NeutralizeDp forward_dp(const LayeredNetwork& net, const ChannelView& cv,
                        const std::vector<std::vector<Cx>>& gain, int m) {
  const int L = net.hop_count();
  NeutralizeDp dp;
  dp.r.resize(L + 1);
  std::vector<Cx> out(net.layers[0], Cx(0));
  out[m] = Cx(1.0, 0.0);
  dp.r[0] = out;
  for (int l = 1; l <= L; ++l) {
    dp.r[l].assign(net.layers[l], Cx(0));
    for (const Edge& e : net.edges)
      if (e.hop == l - 1) dp.r[l][e.rx] += cv.slots(e.hop, e.tx, e.rx)[0] * out[e.tx];
    if (l < L) {
      out.assign(net.layers[l], Cx(0));
      for (int i = 0; i < net.layers[l]; ++i) out[i] = gain[l][i] * dp.r[l][i];
    }
  }
  return dp;
}

// b[l][i]: transfer from node (l,i)'s output to sink n, through downstream
// gains.
std::vector<std::vector<Cx>> backward_dp(const LayeredNetwork& net,
                                         const ChannelView& cv,
                                         const std::vector<std::vector<Cx>>& gain,
                                         int n) {
  const int L = net.hop_count();
  std::vector<std::vector<Cx>> b(L + 1);
  b[L].assign(net.layers[L], Cx(0));
  b[L][n] = Cx(1.0, 0.0);
  for (int l = L - 1; l >= 0; --l) {
    b[l].assign(net.layers[l], Cx(0));
    for (const Edge& e : net.edges)
      if (e.hop == l) {
        Cx down = (l + 1 == L) ? b[L][e.rx] : gain[l + 1][e.rx] * b[l + 1][e.rx];
        b[l][e.tx] += cv.slots(e.hop, e.tx, e.rx)[0] * down;
      }
  }
  return b;
}

double gross_transfer_bound(const LayeredNetwork& net, const ChannelView& cv,
                            const std::vector<std::vector<Cx>>& gain) {
  const int L = net.hop_count();
  std::vector<double> cur(net.layers[0], 1.0);
  double best = 0.0;
  for (int l = 1; l <= L; ++l) {
    std::vector<double> nxt(net.layers[l], 0.0);
    for (const Edge& e : net.edges)
      if (e.hop == l - 1)
        nxt[e.rx] += std::abs(cv.slots(e.hop, e.tx, e.rx)[0]) * cur[e.tx];
    if (l < L)
      for (int i = 0; i < net.layers[l]; ++i) nxt[i] *= std::abs(gain[l][i]);
    for (double v : nxt) best = std::max(best, v);
    cur = std::move(nxt);
  }
  return std::max(best, 1e-30);
}

// Random element of the null space of a small complex system (plain bilinear
// form, no conjugation); empty when the system has full column rank.
std::vector<Cx> bilinear_null(const std::vector<std::vector<Cx>>& rows_in,
                              int n, std::mt19937_64& rng) {
  std::vector<std::vector<Cx>> red;  // reduced independent rows
  std::vector<int> pivots;           // pivot column of each reduced row
  for (std::vector<Cx> row : rows_in) {
    double scale0 = 0.0;
    for (Cx v : row) scale0 = std::max(scale0, std::abs(v));
    for (size_t k = 0; k < red.size(); ++k) {
      Cx f = row[pivots[k]] / red[k][pivots[k]];
      for (int c = 0; c < n; ++c) row[c] -= f * red[k][c];
    }
    int pc = -1;
    double best = 0.0;
    for (int c = 0; c < n; ++c)
      if (std::abs(row[c]) > best) {
        best = std::abs(row[c]);
        pc = c;
      }
    if (pc < 0 || best <= 1e-10 * std::max(scale0, 1e-30)) continue;
    red.push_back(std::move(row));
    pivots.push_back(pc);
  }
  std::vector<char> is_pivot(n, 0);
  for (int c : pivots) is_pivot[c] = 1;
  std::vector<Cx> g(n, Cx(0));
  bool any_free = false;
  for (int c = 0; c < n; ++c)
    if (!is_pivot[c]) {
      any_free = true;
      g[c] = draw_cx(rng);
    }
  if (!any_free) return {};
  // Each reduced row has zeros at earlier pivots; solve back-to-front.
  for (size_t k = red.size(); k-- > 0;) {
    Cx acc(0);
    for (int c = 0; c < n; ++c)
      if (c != pivots[k]) acc += red[k][c] * g[c];
    g[pivots[k]] = -acc / red[k][pivots[k]];
  }
  return g;
}

}  // namespace

LinearScheme build_scheme_neutralize(const LayeredNetwork& net,
                                     std::array<MessageId, 2> kept,
                                     const ChannelRealization& ch) {
  require_channel_shape(net, ch, 1, "build_scheme_neutralize");
  if (net.mode != NetMode::Wireless)
    throw SchemeError("build_scheme_neutralize: wireless networks only");
  if (kept[0].m == kept[1].m || kept[0].n == kept[1].n)
    throw SchemeError(
        "build_scheme_neutralize: kept messages must use distinct sources "
        "and distinct sinks");
  for (MessageId w : kept)
    if (net.path_count(w.m, w.n) == 0)
      throw SchemeError("build_scheme_neutralize: kept message " +
                        message_name(w) + " has no path");
  const int L = net.hop_count();
  ChannelView cv(net, ch);
  std::mt19937_64 rng = rng_from_channels(ch);

  struct Pair {
    int m, n;
  };
  std::vector<Pair> live;
  for (int k = 0; k < 2; ++k) {
    Pair p{kept[k].m, kept[1 - k].n};
    long long cnt = net.path_count(p.m, p.n);
    if (cnt == 1)
      throw SchemeError(
          "build_scheme_neutralize: cross pair " +
          message_name({p.m, p.n}) +
          " has exactly one path; scalar gains cannot neutralize it");
    if (cnt > 1) live.push_back(p);
  }

  std::vector<std::vector<Cx>> gain(L);
  for (int l = 1; l < L; ++l) {
    gain[l].assign(net.layers[l], Cx(1.0, 0.0));
    if (!live.empty())
      for (int i = 0; i < net.layers[l]; ++i) gain[l][i] = draw_cx(rng);
  }

  auto transfer = [&](int m, int n) {
    return forward_dp(net, cv, gain, m).r[L][n];
  };
  auto coeff_row = [&](const Pair& p, int l) {
    NeutralizeDp fwd = forward_dp(net, cv, gain, p.m);
    auto bwd = backward_dp(net, cv, gain, p.n);
    std::vector<Cx> c(net.layers[l]);
    for (int i = 0; i < net.layers[l]; ++i) c[i] = fwd.r[l][i] * bwd[l][i];
    return c;
  };
  double gross = gross_transfer_bound(net, cv, gain);
  auto accept = [&]() {
    double g2 = gross_transfer_bound(net, cv, gain);
    for (const Pair& p : live)
      if (std::abs(transfer(p.m, p.n)) > 1e-9 * g2) return false;
    for (MessageId w : kept)
      if (std::abs(transfer(w.m, w.n)) < 1e-9 * g2) return false;
    return true;
  };

  bool solved = live.empty();
  if (solved && L > 1) {
    // Nothing to cancel: unit gains throughout.
    for (int l = 1; l < L; ++l)
      gain[l].assign(net.layers[l], Cx(1.0, 0.0));
  }

  if (!solved && live.size() == 1) {
    const Pair& p = live[0];
    for (int l = 1; l < L && !solved; ++l) {
      std::vector<Cx> c = coeff_row(p, l);
      double cmax = 0.0;
      for (Cx v : c) cmax = std::max(cmax, std::abs(v));
      int nz = 0;
      for (Cx v : c)
        if (std::abs(v) > 1e-10 * std::max(cmax, 1e-30)) ++nz;
      if (nz < 2) continue;
      std::vector<Cx> g = bilinear_null({c}, net.layers[l], rng);
      if (g.empty()) continue;
      auto saved = gain[l];
      gain[l] = g;
      if (accept())
        solved = true;
      else
        gain[l] = saved;
    }
    if (!solved) {
      // Interference funnels through a single relay per layer; silencing one
      // that the desired messages can avoid still works.
      for (int l = 1; l < L && !solved; ++l) {
        std::vector<Cx> c = coeff_row(p, l);
        for (int i = 0; i < net.layers[l] && !solved; ++i) {
          if (std::abs(c[i]) < 1e-13) continue;
          Cx saved = gain[l][i];
          gain[l][i] = Cx(0);
          if (accept())
            solved = true;
          else
            gain[l][i] = saved;
        }
      }
    }
  }

  if (!solved && live.size() == 2) {
    // One relay layer with enough freedom for both constraints.
    for (int l = 1; l < L && !solved; ++l) {
      std::vector<std::vector<Cx>> rows;
      for (const Pair& p : live) rows.push_back(coeff_row(p, l));
      std::vector<Cx> g = bilinear_null(rows, net.layers[l], rng);
      if (g.empty()) continue;
      auto saved = gain[l];
      gain[l] = g;
      if (accept())
        solved = true;
      else
        gain[l] = saved;
    }
    if (!solved && L >= 3) {
      // Bilinear split across the first and last relay layers.
      int l1 = 1, l2 = L - 1;
      int n1 = net.layers[l1], n2 = net.layers[l2];
      std::array<std::vector<std::vector<Cx>>, 2> M;
      for (int p = 0; p < 2; ++p) {
        NeutralizeDp fwd = forward_dp(net, cv, gain, live[p].m);
        auto bwd = backward_dp(net, cv, gain, live[p].n);
        M[p].assign(n1, std::vector<Cx>(n2, Cx(0)));
        for (int u = 0; u < n1; ++u) {
          // Transfer from u's output to every layer-l2 reception.
          std::vector<Cx> cur(n1, Cx(0));
          cur[u] = Cx(1.0, 0.0);
          std::vector<Cx> at = cur;
          for (int l = l1; l < l2; ++l) {
            std::vector<Cx> nxt(net.layers[l + 1], Cx(0));
            for (const Edge& e : net.edges)
              if (e.hop == l)
                nxt[e.rx] += cv.slots(e.hop, e.tx, e.rx)[0] * at[e.tx];
            if (l + 1 < l2)
              for (int i = 0; i < net.layers[l + 1]; ++i)
                nxt[i] *= gain[l + 1][i];
            at = std::move(nxt);
          }
          for (int v = 0; v < n2; ++v)
            M[p][u][v] = fwd.r[l1][u] * at[v] * bwd[l2][v];
        }
      }
      auto apply_Mb = [&](int p, const std::vector<Cx>& b) {
        std::vector<Cx> u(n1, Cx(0));
        for (int i = 0; i < n1; ++i)
          for (int v = 0; v < n2; ++v) u[i] += M[p][i][v] * b[v];
        return u;
      };
      auto try_pair = [&](const std::vector<Cx>& a, const std::vector<Cx>& b) {
        auto sa = gain[l1];
        auto sb = gain[l2];
        gain[l1] = a;
        gain[l2] = b;
        if (accept()) return true;
        gain[l1] = sa;
        gain[l2] = sb;
        return false;
      };
      if (n1 >= 3) {
        std::vector<Cx> b(n2);
        for (Cx& v : b) v = draw_cx(rng);
        std::vector<std::vector<Cx>> rows = {apply_Mb(0, b), apply_Mb(1, b)};
        std::vector<Cx> a = bilinear_null(rows, n1, rng);
        if (!a.empty()) solved = try_pair(a, b);
      } else if (n1 == 2) {
        std::vector<Cx> b0(n2);
        for (Cx& v : b0) v = draw_cx(rng);
        auto det2 = [](const std::vector<Cx>& x, const std::vector<Cx>& y) {
          return x[0] * y[1] - x[1] * y[0];
        };
        for (int w = 0; w < n2 && !solved; ++w) {
          std::vector<Cx> ew(n2, Cx(0));
          ew[w] = Cx(1.0, 0.0);
          auto p0 = apply_Mb(0, b0), q0 = apply_Mb(0, ew);
          auto r0 = apply_Mb(1, b0), s0 = apply_Mb(1, ew);
          Cx A = det2(q0, s0);
          Cx B = det2(p0, s0) + det2(q0, r0);
          Cx C = det2(p0, r0);
          std::vector<Cx> roots;
          if (std::abs(A) > 1e-13) {
            Cx disc = std::sqrt(B * B - 4.0 * A * C);
            roots.push_back((-B + disc) / (2.0 * A));
            roots.push_back((-B - disc) / (2.0 * A));
          } else if (std::abs(B) > 1e-13) {
            roots.push_back(-C / B);
          } else if (std::abs(C) < 1e-13) {
            roots.push_back(Cx(0));
          }
          for (Cx t : roots) {
            std::vector<Cx> b = b0;
            b[w] += t;
            double bn = 0.0;
            for (Cx v : b) bn += std::norm(v);
            if (bn < 1e-20) continue;
            auto u0 = apply_Mb(0, b), u1 = apply_Mb(1, b);
            double m0 = std::hypot(std::abs(u0[0]), std::abs(u0[1]));
            double m1 = std::hypot(std::abs(u1[0]), std::abs(u1[1]));
            const std::vector<Cx>& u = (m0 >= m1) ? u0 : u1;
            std::vector<Cx> a(2);
            if (std::max(m0, m1) < 1e-12 * gross) {
              a[0] = draw_cx(rng);
              a[1] = draw_cx(rng);
            } else {
              a[0] = u[1];
              a[1] = -u[0];
            }
            if (try_pair(a, b)) {
              solved = true;
              break;
            }
          }
        }
      }
    }
    if (!solved && L == 2)
      throw SchemeError(
          "build_scheme_neutralize: a single width-2 relay layer cannot "
          "neutralize both cross transfers");
  }

  if (!solved && !live.empty())
    throw DegenerateDrawError(
        "degenerate draw: no admissible scalar-gain neutralization found");

  LinearScheme scheme;
  scheme.T = 1;
  Vec one(1);
  one(0) = 1.0;
  scheme.streams.push_back({stream_label(kept[0], 0), kept[0], one});
  scheme.streams.push_back({stream_label(kept[1], 0), kept[1], one});
  for (int l = 1; l < L; ++l)
    for (int i = 0; i < net.layers[l]; ++i) {
      RelayOp op;
      op.node = {l, i};
      op.kind = RelayOp::Kind::AmplifyForward;
      op.af_gain = Vec::Constant(1, gain[l][i]);
      scheme.relay_ops.push_back(std::move(op));
    }
  scheme.desired.assign(net.num_sinks(), {});
  scheme.desired[kept[0].n] = {0};
  scheme.desired[kept[1].n] = {1};
  return scheme;
}

//=== five-thirds ==============================================================

LinearScheme build_scheme_5over3(const LayeredNetwork& net,
                                 const ChannelRealization& ch) {
  require_channel_shape(net, ch, 3, "build_scheme_5over3");
  auto sigma_opt = match_five_thirds(net);
  if (!sigma_opt)
    throw SchemeError(
        "build_scheme_5over3: network is not the five-thirds topology");
  const auto& sigma = *sigma_opt;
  ChannelView cv(net, ch);
  auto H = [&](int l, int i_ref, int j_ref) {
    return slots_vec(cv, l, sigma[l][i_ref], sigma[l + 1][j_ref]);
  };
  std::mt19937_64 rng = rng_from_channels(ch);

  MessageId w11{sigma[0][0], sigma[3][0]};
  MessageId w12{sigma[0][0], sigma[3][1]};
  MessageId w21{sigma[0][1], sigma[3][0]};
  MessageId w22{sigma[0][1], sigma[3][1]};

  LinearScheme scheme;
  scheme.T = 3;
  scheme.streams.push_back({stream_label(w11, 0), w11, random_unit(3, rng)});
  scheme.streams.push_back({stream_label(w12, 1), w12, random_unit(3, rng)});
  scheme.streams.push_back({stream_label(w12, 2), w12, random_unit(3, rng)});
  scheme.streams.push_back({stream_label(w21, 0), w21, random_unit(3, rng)});
  scheme.streams.push_back({stream_label(w22, 0), w22, random_unit(3, rng)});
  // ids: 0=x11, 1=x12(1), 2=x12(2), 3=x21, 4=x22

  Vec U1a = random_unit(3, rng);
  Vec U1b = random_unit(3, rng);
  Vec U2 = random_unit(3, rng);
  Vec U3a = random_unit(3, rng);
  // Align x22 with x12(1) inside the first middle relay: the two arriving
  // columns are made exactly equal.
  Vec raw = diag_div(diag_mul(H(1, 0, 0), U1b), H(1, 2, 0),
                     "five-thirds alignment");
  double raw_scale = raw.norm();
  Vec U3b = unit_or_throw(raw, "five-thirds alignment");
  Vec V1a = random_unit(3, rng);
  Vec V1b = random_unit(3, rng);
  Vec V2 = random_unit(3, rng);
  Vec V3a = random_unit(3, rng);
  Vec V3b = random_unit(3, rng);

  auto df = [&](int l, int i_ref) {
    RelayOp op;
    op.node = {l, sigma[l][i_ref]};
    op.kind = RelayOp::Kind::DecodeForward;
    return op;
  };
  {  // First-layer relay ref 0: hears source ref 0; forwards x11 and x12(1).
    RelayOp op = df(1, 0);
    op.groups = {{{0}}, {{1}}, {{2}}};
    op.forwards.push_back({U1a, {{0, Cx(1.0, 0.0)}}});
    op.forwards.push_back({U1b, {{1, Cx(1.0, 0.0)}}});
    scheme.relay_ops.push_back(std::move(op));
  }
  {  // First-layer relay ref 1: forwards x12(2).
    RelayOp op = df(1, 1);
    op.groups = {{{0}}, {{1}}, {{2}}};
    op.forwards.push_back({U2, {{2, Cx(1.0, 0.0)}}});
    scheme.relay_ops.push_back(std::move(op));
  }
  {  // First-layer relay ref 2: hears source ref 1; forwards x21 and x22,
     // the latter scaled to land exactly on x12(1)'s column downstream.
    RelayOp op = df(1, 2);
    op.groups = {{{3}}, {{4}}};
    op.forwards.push_back({U3a, {{3, Cx(1.0, 0.0)}}});
    op.forwards.push_back({U3b, {{4, Cx(raw_scale, 0.0)}}});
    scheme.relay_ops.push_back(std::move(op));
  }
  {  // Middle relay ref 0: {x12(1),x22} align; forwards x11 and x21 clean.
    RelayOp op = df(2, 0);
    op.groups = {{{0}}, {{3}}, {{1, 4}}};
    op.forwards.push_back({V1a, {{0, Cx(1.0, 0.0)}}});
    op.forwards.push_back({V1b, {{3, Cx(1.0, 0.0)}}});
    scheme.relay_ops.push_back(std::move(op));
  }
  {  // Middle relay ref 1: hears relay ref 0 only; forwards x12(1).
    RelayOp op = df(2, 1);
    op.groups = {{{0}}, {{1}}};
    op.forwards.push_back({V2, {{1, Cx(1.0, 0.0)}}});
    scheme.relay_ops.push_back(std::move(op));
  }
  {  // Middle relay ref 2: forwards x22 and x12(2).
    RelayOp op = df(2, 2);
    op.groups = {{{2}}, {{3}}, {{4}}};
    op.forwards.push_back({V3a, {{4, Cx(1.0, 0.0)}}});
    op.forwards.push_back({V3b, {{2, Cx(1.0, 0.0)}}});
    scheme.relay_ops.push_back(std::move(op));
  }
  scheme.desired.assign(2, {});
  scheme.desired[sigma[3][0]] = {0, 3};
  scheme.desired[sigma[3][1]] = {1, 2, 4};
  return scheme;
}

//=== end-to-end transfer ======================================================

std::vector<Eigen::MatrixXcd> end_to_end_transfer(const LayeredNetwork& net,
                                                  const ChannelRealization& ch,
                                                  const LinearScheme& scheme) {
  Propagation prop = propagate(net, ch, scheme, /*with_noise=*/false);
  const int L = net.hop_count();
  std::vector<Mat> out;
  out.reserve(net.layers[L]);
  for (int n = 0; n < net.layers[L]; ++n) out.push_back(prop.rx[L][n].streams);
  return out;
}

//=== verification =============================================================

namespace {

// Orthonormal basis of the numerically significant column span.
Mat significant_span(const Mat& M, double rel_tol) {
  if (M.cols() == 0) return Mat::Zero(M.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  int r = 0;
  for (int k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()(k) > rel_tol * std::max(smax, kTiny)) ++r;
  return svd.matrixU().leftCols(r);
}

Mat project_off(const Mat& M, const Mat& basis) {
  if (basis.cols() == 0) return M;
  return M - basis * (basis.adjoint() * M);
}

}  // namespace

VerificationReport verify_scheme(const LayeredNetwork& net,
                                 const ChannelRealization& ch,
                                 const LinearScheme& scheme, double rank_tol,
                                 double residual_tol) {
  VerificationReport rep;
  Propagation prop = propagate(net, ch, scheme, /*with_noise=*/false);
  const int L = net.hop_count();
  const int S = static_cast<int>(scheme.streams.size());
  const double gross = prop.gross_scale;
  const double present_tol = residual_tol * gross;

  auto add = [&rep](std::string node, std::string kind, bool ok,
                    std::string detail) {
    rep.checks.push_back({std::move(node), std::move(kind), ok,
                          std::move(detail)});
  };

  for (const RelayOp& op : scheme.relay_ops) {
    if (op.kind != RelayOp::Kind::DecodeForward) continue;
    std::string name = net.node_name(op.node);
    const Mat& R = prop.rx[op.node.layer][op.node.index].streams;

    std::vector<char> incident(S, 0);
    for (int s = 0; s < S; ++s)
      incident[s] = R.col(s).norm() > present_tol;
    std::vector<int> owner(S, -1);
    bool membership_ok = true;
    std::string membership_detail;
    for (size_t g = 0; g < op.groups.size(); ++g)
      for (int s : op.groups[g].stream_ids) {
        if (s < 0 || s >= S || !incident[s]) {
          membership_ok = false;
          membership_detail = "group lists a stream with no signal here";
          continue;
        }
        if (owner[s] != -1) {
          membership_ok = false;
          membership_detail =
              "stream " + scheme.streams[s].name + " appears in two groups";
        }
        owner[s] = static_cast<int>(g);
      }
    add(name, "group_membership", membership_ok,
        membership_ok ? "groups partition their demodulated streams"
                      : membership_detail);

    // In-group parallelism and realized coefficient vectors.
    std::vector<Vec> rep_col(op.groups.size());
    std::vector<std::vector<Cx>> beta(op.groups.size());
    for (size_t g = 0; g < op.groups.size(); ++g) {
      const auto& ids = op.groups[g].stream_ids;
      if (ids.empty()) continue;
      int rep_id = ids[0];
      for (int s : ids)
        if (R.col(s).norm() > R.col(rep_id).norm()) rep_id = s;
      Vec r = R.col(rep_id);
      rep_col[g] = r;
      double rn2 = std::max(r.squaredNorm(), kTiny);
      bool ok = r.norm() > present_tol;
      double worst = 0.0;
      beta[g].resize(ids.size());
      for (size_t k = 0; k < ids.size(); ++k) {
        Vec c = R.col(ids[k]);
        Cx b = r.dot(c) / rn2;  // Eigen dot conjugates the left argument
        beta[g][k] = b;
        double resid = (c - r * b).norm() / std::max(c.norm(), kTiny);
        worst = std::max(worst, resid);
        if (resid > rank_tol) ok = false;
      }
      rep.max_residual = std::max(rep.max_residual, worst);
      add(name, "group_alignment", ok,
          "worst in-group misalignment " + std::to_string(worst));
    }

    // Groups must be separable from each other and from ignored streams.
    {
      Mat ignored(R.rows(), 0);
      for (int s = 0; s < S; ++s)
        if (incident[s] && owner[s] < 0) {
          ignored.conservativeResize(Eigen::NoChange, ignored.cols() + 1);
          ignored.col(ignored.cols() - 1) = R.col(s);
        }
      int G = 0;
      for (size_t g = 0; g < op.groups.size(); ++g)
        if (!op.groups[g].stream_ids.empty()) ++G;
      if (G > 0) {
        Mat reps(R.rows(), G);
        int k = 0;
        for (size_t g = 0; g < op.groups.size(); ++g)
          if (!op.groups[g].stream_ids.empty()) reps.col(k++) = rep_col[g];
        Mat basis = significant_span(ignored, rank_tol);
        Mat proj = project_off(reps, basis);
        Eigen::JacobiSVD<Mat> svd(proj);
        Eigen::JacobiSVD<Mat> svd_raw(reps);
        double smin = svd.singularValues()(svd.singularValues().size() - 1);
        double smax = svd_raw.singularValues()(0);
        bool ok = proj.cols() <= proj.rows() &&
                  smin > rank_tol * std::max(smax, kTiny);
        add(name, "demod_rank", ok,
            "separability ratio " +
                std::to_string(smin / std::max(smax, kTiny)));
      }
    }

    // Forward combinations must match a single group's realized coefficients.
    for (size_t f = 0; f < op.forwards.size(); ++f) {
      const ForwardEntry& fe = op.forwards[f];
      bool ok = !fe.combo.empty();
      std::string detail;
      int g = -1;
      for (const auto& [sid, coeff] : fe.combo) {
        int og = (sid >= 0 && sid < S) ? owner[sid] : -1;
        if (og < 0) {
          ok = false;
          detail = "forward uses a stream not demodulated here";
        } else if (g >= 0 && og != g) {
          ok = false;
          detail = "forward mixes streams from different groups";
        }
        g = (g < 0) ? og : g;
      }
      if (ok && g >= 0) {
        const auto& ids = op.groups[g].stream_ids;
        std::vector<Cx> gamma(ids.size(), Cx(0));
        double gmax = 0.0;
        for (const auto& [sid, coeff] : fe.combo) {
          auto it = std::find(ids.begin(), ids.end(), sid);
          gamma[static_cast<size_t>(it - ids.begin())] = coeff;
          gmax = std::max(gmax, std::abs(coeff));
        }
        size_t ref = 0;
        for (size_t k = 0; k < ids.size(); ++k)
          if (std::abs(beta[g][k]) > std::abs(beta[g][ref])) ref = k;
        if (std::abs(beta[g][ref]) < kTiny) {
          ok = false;
          detail = "group coefficients vanish";
        } else {
          Cx alpha = gamma[ref] / beta[g][ref];
          double worst = 0.0;
          for (size_t k = 0; k < ids.size(); ++k)
            worst = std::max(worst,
                             std::abs(gamma[k] - alpha * beta[g][k]));
          double scale = std::max(gmax, std::abs(alpha));
          ok = worst <= rank_tol * std::max(scale, kTiny);
          detail = "combination mismatch " + std::to_string(worst);
        }
      }
      add(name, "forward_combo", ok,
          ok ? "forward " + std::to_string(f) +
                   " matches its group's realized coefficients"
             : detail);
    }
  }

  // Sinks: residual interference must vanish or stay separable from the
  // desired columns.
  int decoded = 0;
  if (static_cast<int>(scheme.desired.size()) != net.layers[L])
    throw SchemeError("desired-stream table does not match the sink count");
  for (int n = 0; n < net.layers[L]; ++n) {
    std::string name = net.node_name({L, n});
    const Mat& R = prop.rx[L][n].streams;
    std::vector<char> is_desired(S, 0);
    for (int s : scheme.desired[n]) {
      if (s < 0 || s >= S)
        throw SchemeError("desired stream id out of range at " + name);
      is_desired[s] = 1;
    }
    Mat interf(R.rows(), 0);
    double worst_zero = 0.0;
    for (int s = 0; s < S; ++s) {
      if (is_desired[s]) continue;
      double nrm = R.col(s).norm();
      if (nrm <= present_tol) {
        worst_zero = std::max(worst_zero, nrm / gross);
      } else {
        interf.conservativeResize(Eigen::NoChange, interf.cols() + 1);
        interf.col(interf.cols() - 1) = R.col(s);
      }
    }
    rep.max_residual = std::max(rep.max_residual, worst_zero);
    add(name, "interference_residual", true,
        "worst neutralized-column residual " + std::to_string(worst_zero) +
            ", live interference dims " + std::to_string(interf.cols()));
    if (!scheme.desired[n].empty()) {
      Mat D(R.rows(), scheme.desired[n].size());
      for (size_t k = 0; k < scheme.desired[n].size(); ++k)
        D.col(k) = R.col(scheme.desired[n][k]);
      Mat basis = significant_span(interf, rank_tol);
      Mat proj = project_off(D, basis);
      Eigen::JacobiSVD<Mat> svd(proj);
      Eigen::JacobiSVD<Mat> svd_raw(D);
      double smin = svd.singularValues()(svd.singularValues().size() - 1);
      double smax = svd_raw.singularValues()(0);
      bool ok = proj.cols() <= proj.rows() &&
                smin > rank_tol * std::max(smax, kTiny);
      add(name, "desired_rank", ok,
          "post-projection ratio " +
              std::to_string(smin / std::max(smax, kTiny)));
      if (ok) decoded += static_cast<int>(scheme.desired[n].size());
    }
  }

  rep.sum_dof = Rational(decoded, scheme.T);
  rep.sum_dof.canonicalize();
  rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(),
                           [](const CheckEntry& c) { return c.ok; });
  if (!rep.passed) rep.sum_dof = Rational(0);
  return rep;
}

//=== drivers ==================================================================

std::string scheme_kind_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::Tdma: return "tdma";
    case SchemeKind::XzFamily: return "xz";
    case SchemeKind::XSingleHop: return "x_single_hop";
    case SchemeKind::Neutralize: return "neutralize";
    case SchemeKind::FiveThirds: return "five_thirds";
  }
  return "?";
}

int scheme_extension_length(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::Tdma: return 1;
    case SchemeKind::XzFamily: return 2;
    case SchemeKind::XSingleHop: return 3;
    case SchemeKind::Neutralize: return 1;
    case SchemeKind::FiveThirds: return 3;
  }
  return 1;
}

SynthesisOutcome synthesize_with_retry(const LayeredNetwork& net,
                                       const SchemeSpec& spec, uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int T = scheme_extension_length(spec.kind);
  std::string last = "verification failed";
  for (int attempt = 0; attempt < 2; ++attempt) {
    ChannelRealization ch = draw_channel(net, T, rng);
    try {
      LinearScheme scheme;
      switch (spec.kind) {
        case SchemeKind::Tdma: scheme = build_scheme_tdma(net, ch); break;
        case SchemeKind::XzFamily: scheme = build_scheme_xz(net, ch); break;
        case SchemeKind::XSingleHop:
          scheme = build_scheme_x_single_hop(net, ch);
          break;
        case SchemeKind::Neutralize:
          scheme = build_scheme_neutralize(net, spec.kept, ch);
          break;
        case SchemeKind::FiveThirds:
          scheme = build_scheme_5over3(net, ch);
          break;
      }
      VerificationReport rep = verify_scheme(net, ch, scheme);
      if (rep.passed) return {std::move(scheme), std::move(ch), std::move(rep),
                              attempt};
      for (const CheckEntry& c : rep.checks)
        if (!c.ok) {
          last = c.node + " " + c.kind + ": " + c.detail;
          break;
        }
    } catch (const DegenerateDrawError& e) {
      last = e.what();
    }
  }
  throw DegenerateDrawError("degenerate channel draw persisted after one "
                            "redraw: " + last);
}

}  // namespace xnet
