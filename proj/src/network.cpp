#include "xnet/network.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace xnet {

namespace {

//==============================================================================
// Small lexing helpers
//==============================================================================

std::string strip(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

int parse_int(const std::string& tok, const std::string& what) {
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("malformed document: bad " + what + " '" + tok + "'");
  return value;
}

double parse_double(const std::string& tok, const std::string& what) {
  char* end = nullptr;
  const double value = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size())
    throw ParseError("malformed document: bad " + what + " '" + tok + "'");
  return value;
}

// "s1" -> (0, 0); "v2.3" -> (2, 2); "d1" -> (L, 0).
NodeRef parse_node_name(const std::string& tok, int num_layers) {
  const int last_layer = num_layers - 1;
  try {
    if (tok.size() >= 2 && tok[0] == 's')
      return {0, parse_int(tok.substr(1), "node") - 1};
    if (tok.size() >= 2 && tok[0] == 'd')
      return {last_layer, parse_int(tok.substr(1), "node") - 1};
    if (tok.size() >= 4 && tok[0] == 'v') {
      const auto dot = tok.find('.');
      if (dot == std::string::npos) throw ParseError("bad node");
      return {parse_int(tok.substr(1, dot - 1), "node"),
              parse_int(tok.substr(dot + 1), "node") - 1};
    }
  } catch (const ParseError&) {
    // fall through to the uniform message
  }
  throw ParseError("malformed document: bad node name '" + tok + "'");
}

//==============================================================================
// Reachability
//==============================================================================

// reach[l][i] = true if (l, i) is reachable from some source.
std::vector<std::vector<char>> forward_reach(const LayeredNetwork& net) {
  std::vector<std::vector<char>> reach(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l)
    reach[l].assign(net.layers[l], l == 0);
  for (const Edge& e : net.edges)
    if (reach[e.hop][e.tx]) reach[e.hop + 1][e.rx] = true;
  return reach;
}

// co[l][i] = true if some sink is reachable from (l, i).
std::vector<std::vector<char>> backward_reach(const LayeredNetwork& net) {
  std::vector<std::vector<char>> co(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l)
    co[l].assign(net.layers[l], l + 1 == net.layers.size());
  for (auto it = net.edges.rbegin(); it != net.edges.rend(); ++it)
    if (co[it->hop + 1][it->rx]) co[it->hop][it->tx] = true;
  return co;
}

void sort_edges(std::vector<Edge>& edges) {
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.hop, a.tx, a.rx) < std::tie(b.hop, b.tx, b.rx);
  });
}

}  // namespace

//==============================================================================
// LayeredNetwork queries
//==============================================================================

bool LayeredNetwork::has_edge(int hop, int tx, int rx) const {
  return find_edge(hop, tx, rx) != nullptr;
}

const Edge* LayeredNetwork::find_edge(int hop, int tx, int rx) const {
  for (const Edge& e : edges)
    if (e.hop == hop && e.tx == tx && e.rx == rx) return &e;
  return nullptr;
}

std::vector<int> LayeredNetwork::rx_neighbors(int hop, int tx) const {
  std::vector<int> out;
  for (const Edge& e : edges)
    if (e.hop == hop && e.tx == tx) out.push_back(e.rx);
  return out;
}

std::vector<int> LayeredNetwork::tx_neighbors(int hop, int rx) const {
  std::vector<int> out;
  for (const Edge& e : edges)
    if (e.hop == hop && e.rx == rx) out.push_back(e.tx);
  return out;
}

long long LayeredNetwork::path_count(int m, int n) const {
  std::vector<std::vector<long long>> count(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) count[l].assign(layers[l], 0);
  count[0][m] = 1;
  for (const Edge& e : edges) count[e.hop + 1][e.rx] += count[e.hop][e.tx];
  return count[layers.size() - 1][n];
}

bool LayeredNetwork::on_some_path(NodeRef u) const {
  return forward_reach(*this)[u.layer][u.index] &&
         backward_reach(*this)[u.layer][u.index];
}

std::string LayeredNetwork::node_name(NodeRef u) const {
  if (u.layer == 0) return "s" + std::to_string(u.index + 1);
  if (u.layer == hop_count()) return "d" + std::to_string(u.index + 1);
  return "v" + std::to_string(u.layer) + "." + std::to_string(u.index + 1);
}

//==============================================================================
// Parsing
//==============================================================================

ParseResult parse_network(const std::string& text) {
  LayeredNetwork net;
  bool have_layers = false;
  bool have_mode = false;
  std::vector<Edge> edges;

  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = strip(raw);
    if (line.empty()) continue;

    if (line.rfind("layers:", 0) == 0) {
      if (have_layers)
        throw ParseError("malformed document: duplicate layers header");
      std::string body = strip(line.substr(7));
      if (body.size() < 2 || body.front() != '[' || body.back() != ']')
        throw ParseError("malformed document: layers header needs [..]");
      body = body.substr(1, body.size() - 2);
      for (auto& c : body)
        if (c == ',') c = ' ';
      for (const auto& tok : tokens_of(body)) {
        const int n = parse_int(tok, "layer size");
        if (n < 0) throw ParseError("malformed document: negative layer size");
        net.layers.push_back(n);
      }
      if (net.layers.size() < 2)
        throw ParseError("malformed document: need at least 2 layers");
      have_layers = true;
      continue;
    }

    if (line.rfind("mode:", 0) == 0) {
      if (have_mode)
        throw ParseError("malformed document: duplicate mode header");
      const std::string value = strip(line.substr(5));
      if (value == "wireless")
        net.mode = NetMode::Wireless;
      else if (value == "wired")
        net.mode = NetMode::Wired;
      else
        throw ParseError("malformed document: unknown mode '" + value + "'");
      have_mode = true;
      continue;
    }

    const auto toks = tokens_of(line);
    if (toks.empty()) continue;

    if (toks[0] == "edge" || toks[0] == "link") {
      if (!have_layers)
        throw ParseError("malformed document: edge before layers header");
      Edge e;
      std::size_t extra_at = 0;
      if (toks[0] == "edge") {
        if (toks.size() < 4)
          throw ParseError("malformed document: edge needs 'edge l i j'");
        const int l = parse_int(toks[1], "hop");
        const int i = parse_int(toks[2], "tx index");
        const int j = parse_int(toks[3], "rx index");
        if (l < 1 || l > net.hop_count())
          throw ParseError("malformed document: hop " + std::to_string(l) +
                           " out of range");
        e.hop = l - 1;
        e.tx = i - 1;
        e.rx = j - 1;
        extra_at = 4;
      } else {
        if (toks.size() < 3)
          throw ParseError("malformed document: link needs 'link a b'");
        const NodeRef a =
            parse_node_name(toks[1], static_cast<int>(net.layers.size()));
        const NodeRef b =
            parse_node_name(toks[2], static_cast<int>(net.layers.size()));
        if (b.layer != a.layer + 1)
          throw ParseError("non-layered edge: " + toks[1] + " -> " + toks[2]);
        e.hop = a.layer;
        e.tx = a.index;
        e.rx = b.index;
        extra_at = 3;
      }

      if (e.tx < 0 || e.tx >= net.layers[e.hop] || e.rx < 0 ||
          e.rx >= net.layers[e.hop + 1])
        throw ParseError("malformed document: node index out of range in '" +
                         line + "'");

      const std::size_t extras = toks.size() - extra_at;
      if (net.mode == NetMode::Wireless) {
        if (extras == 2) {
          const double re = parse_double(toks[extra_at], "coefficient");
          const double im = parse_double(toks[extra_at + 1], "coefficient");
          if (re == 0.0 && im == 0.0)
            throw ParseError("zero wireless coefficient in '" + line + "'");
          e.coeff = std::complex<double>(re, im);
        } else if (extras != 0) {
          throw ParseError(
              "malformed document: wireless edge takes 0 or 2 extra fields");
        }
      } else {
        if (extras == 1) {
          const auto cap = parse_rational(toks[extra_at]);
          if (!cap) {
            throw ParseError("malformed document: bad capacity '" +
                             toks[extra_at] + "'");
          }
          if (*cap <= 0)
            throw ParseError("nonpositive capacity in '" + line + "'");
          e.capacity = *cap;
        } else if (extras == 0) {
          e.capacity = Rational(1);
        } else {
          throw ParseError(
              "malformed document: wired edge takes 0 or 1 extra field");
        }
      }

      for (const Edge& prev : edges)
        if (prev == e)
          throw ParseError("malformed document: duplicate edge in '" + line +
                           "'");
      edges.push_back(e);
      continue;
    }

    throw ParseError("malformed document: unrecognized line '" + line + "'");
  }

  if (!have_layers) throw ParseError("malformed document: missing layers");
  if (net.mode == NetMode::Wireless &&
      (net.layers.front() != 2 || net.layers.back() != 2))
    throw ParseError(
        "wrong source/sink count: wireless networks need exactly 2 sources "
        "and 2 sinks");
  if (net.mode == NetMode::Wired &&
      (net.layers.front() < 1 || net.layers.back() < 1))
    throw ParseError("wrong source/sink count: need at least 1 source/sink");

  net.edges = std::move(edges);
  sort_edges(net.edges);

  // Prune relays that are on no source->sink path, reindexing layers.
  ParseResult result;
  const auto fwd = forward_reach(net);
  const auto bwd = backward_reach(net);
  std::vector<std::vector<int>> remap(net.layers.size());
  LayeredNetwork pruned;
  pruned.mode = net.mode;
  pruned.layers.resize(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    remap[l].assign(net.layers[l], -1);
    int next = 0;
    for (int i = 0; i < net.layers[l]; ++i) {
      const bool terminal = (l == 0 || l + 1 == net.layers.size());
      const bool keep = terminal || (fwd[l][i] && bwd[l][i]);
      if (keep) {
        remap[l][i] = next++;
      } else {
        result.warnings.push_back(
            {"pruned relay " +
             net.node_name({static_cast<int>(l), i}) +
             " (not on any source-sink path)"});
      }
    }
    pruned.layers[l] = next;
  }
  for (const Edge& e : net.edges) {
    Edge kept = e;
    kept.tx = remap[e.hop][e.tx];
    kept.rx = remap[e.hop + 1][e.rx];
    if (kept.tx >= 0 && kept.rx >= 0) pruned.edges.push_back(kept);
  }
  sort_edges(pruned.edges);
  result.network = std::move(pruned);
  return result;
}

std::string serialize(const LayeredNetwork& net) {
  std::ostringstream out;
  out << "layers: [";
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    if (l) out << ", ";
    out << net.layers[l];
  }
  out << "]\n";
  out << "mode: " << (net.mode == NetMode::Wireless ? "wireless" : "wired")
      << "\n";
  char buf[64];
  for (const Edge& e : net.edges) {
    out << "edge " << (e.hop + 1) << " " << (e.tx + 1) << " " << (e.rx + 1);
    if (net.mode == NetMode::Wireless && e.coeff) {
      std::snprintf(buf, sizeof buf, "%.17g", e.coeff->real());
      out << " " << buf;
      std::snprintf(buf, sizeof buf, "%.17g", e.coeff->imag());
      out << " " << buf;
    } else if (net.mode == NetMode::Wired && e.capacity) {
      out << " " << to_string(*e.capacity);
    }
    out << "\n";
  }
  return out.str();
}

//==============================================================================
// Generic min-cut (vertex-disjoint paths)
//==============================================================================

int generic_min_cut(const LayeredNetwork& net) {
  // Split every node u into u_in -> u_out with capacity 1; graph edges get a
  // large capacity (node caps already enforce disjointness).  Sources hang
  // off a super-source, sinks feed a super-sink.
  std::vector<int> offset(net.layers.size(), 0);
  int n_nodes = 0;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    offset[l] = n_nodes;
    n_nodes += net.layers[l];
  }
  const int n = 2 * n_nodes + 2;  // in/out per node + super source/sink
  const int S = 2 * n_nodes, T = 2 * n_nodes + 1;
  const int big = n_nodes + 1;

  struct Arc {
    int to, cap, rev;
  };
  std::vector<std::vector<Arc>> adj(n);
  auto add_arc = [&](int a, int b, int cap) {
    adj[a].push_back({b, cap, static_cast<int>(adj[b].size())});
    adj[b].push_back({a, 0, static_cast<int>(adj[a].size()) - 1});
  };
  auto node_in = [&](int layer, int index) {
    return 2 * (offset[layer] + index);
  };
  auto node_out = [&](int layer, int index) {
    return 2 * (offset[layer] + index) + 1;
  };

  for (std::size_t l = 0; l < net.layers.size(); ++l)
    for (int i = 0; i < net.layers[l]; ++i)
      add_arc(node_in(static_cast<int>(l), i), node_out(static_cast<int>(l), i),
              1);
  for (const Edge& e : net.edges)
    add_arc(node_out(e.hop, e.tx), node_in(e.hop + 1, e.rx), big);
  for (int i = 0; i < net.layers.front(); ++i) add_arc(S, node_in(0, i), big);
  for (int i = 0; i < net.layers.back(); ++i)
    add_arc(node_out(net.hop_count(), i), T, big);

  // Edmonds-Karp.
  int flow = 0;
  while (true) {
    std::vector<std::pair<int, int>> parent(n, {-1, -1});  // node, arc idx
    std::vector<int> queue = {S};
    parent[S] = {S, 0};
    for (std::size_t qi = 0; qi < queue.size() && parent[T].first < 0; ++qi) {
      const int u = queue[qi];
      for (std::size_t k = 0; k < adj[u].size(); ++k) {
        const Arc& a = adj[u][k];
        if (a.cap > 0 && parent[a.to].first < 0) {
          parent[a.to] = {u, static_cast<int>(k)};
          queue.push_back(a.to);
        }
      }
    }
    if (parent[T].first < 0) break;
    for (int v = T; v != S;) {
      auto [u, k] = parent[v];
      adj[u][k].cap -= 1;
      adj[adj[u][k].to][adj[u][k].rev].cap += 1;
      v = u;
    }
    ++flow;
  }
  return flow;
}

}  // namespace xnet
