#include "xnet/flow.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

namespace xnet {

namespace {

// Residual graph with a super-source (id N) and super-sink (id N+1).
struct Residual {
  int n = 0;                       // total nodes incl. the two super nodes
  std::vector<std::vector<int>> adj;  // arc ids per node (arcs + reverses)
  std::vector<int> head;
  std::vector<Rational> cap;
  int super_source = 0;
  int super_sink = 0;

  int add_arc(int u, int v, const Rational& c) {
    int id = static_cast<int>(head.size());
    head.push_back(v);
    cap.push_back(c);
    adj[u].push_back(id);
    head.push_back(u);
    cap.push_back(Rational(0));
    adj[v].push_back(id + 1);
    return id;
  }
};

void check_acyclic(const WiredDag& dag) {
  std::vector<int> indeg(dag.node_count, 0);
  std::vector<std::vector<int>> out(dag.node_count);
  for (const auto& a : dag.arcs) {
    if (a.from < 0 || a.from >= dag.node_count || a.to < 0 ||
        a.to >= dag.node_count)
      throw FlowError("arc endpoint out of range");
    if (a.from == a.to) throw FlowError("self-loop arc");
    ++indeg[a.to];
    out[a.from].push_back(a.to);
  }
  std::queue<int> q;
  for (int v = 0; v < dag.node_count; ++v)
    if (indeg[v] == 0) q.push(v);
  int seen = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    ++seen;
    for (int w : out[v])
      if (--indeg[w] == 0) q.push(w);
  }
  if (seen != dag.node_count)
    throw FlowError("the wired graph contains a directed cycle");
}

Rational sentinel_capacity(const WiredDag& dag) {
  // Strictly larger than the total finite capacity, so super arcs never bind.
  Rational big(1);
  for (const auto& a : dag.arcs) big += a.capacity;
  return big;
}

}  // namespace

WiredDag to_wired_dag(const LayeredNetwork& net) {
  if (net.mode != NetMode::Wired)
    throw FlowError("max-flow routing applies to wired networks only");
  WiredDag dag;
  const int L = net.hop_count();
  std::vector<int> base(L + 1, 0);
  for (int l = 1; l <= L; ++l) base[l] = base[l - 1] + net.layers[l - 1];
  dag.node_count = base[L] + net.layers[L];
  for (int l = 0; l <= L; ++l)
    for (int i = 0; i < net.layers[l]; ++i)
      dag.names.push_back(net.node_name({l, i}));
  for (int i = 0; i < net.layers[0]; ++i) dag.sources.push_back(i);
  for (int i = 0; i < net.layers[L]; ++i) dag.sinks.push_back(base[L] + i);
  for (const Edge& e : net.edges) {
    Rational c = e.capacity.value_or(Rational(1));
    dag.arcs.push_back({base[e.hop] + e.tx, base[e.hop + 1] + e.rx, c});
  }
  return dag;
}

FlowSolution max_flow_routing(const LayeredNetwork& net) {
  return max_flow_routing(to_wired_dag(net));
}

FlowSolution max_flow_routing(const WiredDag& dag) {
  if (dag.sources.empty() || dag.sinks.empty())
    throw FlowError("need at least one source and one sink");
  for (const auto& a : dag.arcs)
    if (!(a.capacity > 0)) throw FlowError("nonpositive arc capacity");
  check_acyclic(dag);

  Residual res;
  res.n = dag.node_count + 2;
  res.adj.resize(res.n);
  res.super_source = dag.node_count;
  res.super_sink = dag.node_count + 1;
  Rational big = sentinel_capacity(dag);
  std::vector<int> arc_id(dag.arcs.size());
  for (size_t k = 0; k < dag.arcs.size(); ++k)
    arc_id[k] = res.add_arc(dag.arcs[k].from, dag.arcs[k].to,
                            dag.arcs[k].capacity);
  for (int s : dag.sources) res.add_arc(res.super_source, s, big);
  for (int t : dag.sinks) res.add_arc(t, res.super_sink, big);

  // Edmonds-Karp: BFS augmenting paths on the residual graph.
  Rational total(0);
  while (true) {
    std::vector<int> via(res.n, -1);
    std::vector<char> seen(res.n, 0);
    std::queue<int> q;
    q.push(res.super_source);
    seen[res.super_source] = 1;
    while (!q.empty() && !seen[res.super_sink]) {
      int u = q.front();
      q.pop();
      for (int id : res.adj[u]) {
        int v = res.head[id];
        if (!seen[v] && res.cap[id] > 0) {
          seen[v] = 1;
          via[v] = id;
          q.push(v);
        }
      }
    }
    if (!seen[res.super_sink]) break;
    Rational aug = big;
    for (int v = res.super_sink; v != res.super_source;) {
      int id = via[v];
      aug = std::min(aug, res.cap[id]);
      v = res.head[id ^ 1];
    }
    for (int v = res.super_sink; v != res.super_source;) {
      int id = via[v];
      res.cap[id] -= aug;
      res.cap[id ^ 1] += aug;
      v = res.head[id ^ 1];
    }
    total += aug;
  }

  FlowSolution sol;
  sol.sum_rate = total;
  sol.arc_flow.resize(dag.arcs.size());
  for (size_t k = 0; k < dag.arcs.size(); ++k)
    sol.arc_flow[k] = res.cap[arc_id[k] ^ 1];  // reverse cap == pushed flow

  // Min-cut certificate: nodes reachable in the final residual graph.
  {
    std::vector<char> reach(res.n, 0);
    std::queue<int> q;
    q.push(res.super_source);
    reach[res.super_source] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int id : res.adj[u])
        if (res.cap[id] > 0 && !reach[res.head[id]]) {
          reach[res.head[id]] = 1;
          q.push(res.head[id]);
        }
    }
    for (int v = 0; v < dag.node_count; ++v)
      if (reach[v]) sol.cut_source_side.push_back(v);
    sol.cut_value = Rational(0);
    for (size_t k = 0; k < dag.arcs.size(); ++k)
      if (reach[dag.arcs[k].from] && !reach[dag.arcs[k].to]) {
        sol.cut_arcs.push_back(static_cast<int>(k));
        sol.cut_value += dag.arcs[k].capacity;
      }
  }

  // Shortest-path peeling over the positive-flow subgraph; smallest node id
  // wins every tie, so the decomposition is deterministic.
  std::vector<int> src_pos(dag.node_count, -1), snk_pos(dag.node_count, -1);
  for (size_t i = 0; i < dag.sources.size(); ++i)
    src_pos[dag.sources[i]] = static_cast<int>(i);
  for (size_t i = 0; i < dag.sinks.size(); ++i)
    snk_pos[dag.sinks[i]] = static_cast<int>(i);
  std::vector<Rational> left = sol.arc_flow;
  std::vector<std::vector<int>> out_arcs(dag.node_count);
  for (size_t k = 0; k < dag.arcs.size(); ++k)
    out_arcs[dag.arcs[k].from].push_back(static_cast<int>(k));
  for (auto& v : out_arcs)
    std::sort(v.begin(), v.end(), [&](int a, int b) {
      return dag.arcs[a].to != dag.arcs[b].to ? dag.arcs[a].to < dag.arcs[b].to
                                              : a < b;
    });
  while (true) {
    // BFS from all sources (ascending id) through arcs with leftover flow.
    std::vector<int> via(dag.node_count, -2);
    std::queue<int> q;
    std::vector<int> srcs = dag.sources;
    std::sort(srcs.begin(), srcs.end());
    for (int s : srcs)
      if (via[s] == -2) {
        via[s] = -1;
        q.push(s);
      }
    int hit = -1;
    while (!q.empty() && hit < 0) {
      int u = q.front();
      q.pop();
      if (snk_pos[u] >= 0 && via[u] != -2) {
        hit = u;
        break;
      }
      for (int k : out_arcs[u])
        if (left[k] > 0 && via[dag.arcs[k].to] == -2) {
          via[dag.arcs[k].to] = k;
          q.push(dag.arcs[k].to);
        }
    }
    if (hit < 0) break;
    std::vector<int> arcs_on_path;
    Rational rate = sol.sum_rate + 1;
    for (int v = hit; via[v] >= 0;) {
      int k = via[v];
      arcs_on_path.push_back(k);
      rate = std::min(rate, left[k]);
      v = dag.arcs[k].from;
    }
    std::reverse(arcs_on_path.begin(), arcs_on_path.end());
    if (arcs_on_path.empty()) break;
    for (int k : arcs_on_path) left[k] -= rate;
    RoutedPath path;
    path.rate = rate;
    path.nodes.push_back(dag.arcs[arcs_on_path.front()].from);
    for (int k : arcs_on_path) path.nodes.push_back(dag.arcs[k].to);
    path.source_index = src_pos[path.nodes.front()];
    path.sink_index = snk_pos[path.nodes.back()];
    path.message = "W" + std::to_string(path.source_index + 1) +
                   std::to_string(path.sink_index + 1);
    sol.paths.push_back(std::move(path));
  }
  return sol;
}

RoutingCheck verify_routing(const WiredDag& dag,
                            const FlowSolution& solution) {
  RoutingCheck check;
  auto fail = [&check](std::string why) {
    check.failures.push_back(std::move(why));
  };
  std::map<std::pair<int, int>, std::vector<int>> arcs_by_pair;
  for (size_t k = 0; k < dag.arcs.size(); ++k)
    arcs_by_pair[{dag.arcs[k].from, dag.arcs[k].to}].push_back(
        static_cast<int>(k));
  std::vector<char> is_source(dag.node_count, 0), is_sink(dag.node_count, 0);
  for (int s : dag.sources) is_source[s] = 1;
  for (int t : dag.sinks) is_sink[t] = 1;

  // Re-accumulate arc loads from the path list.
  std::vector<Rational> load(dag.arcs.size(), Rational(0));
  Rational total(0);
  for (size_t p = 0; p < solution.paths.size(); ++p) {
    const RoutedPath& path = solution.paths[p];
    std::string tag = "path " + std::to_string(p);
    if (!(path.rate > 0)) fail(tag + ": nonpositive rate");
    if (path.nodes.size() < 2) {
      fail(tag + ": fewer than two nodes");
      continue;
    }
    if (!is_source[path.nodes.front()])
      fail(tag + ": does not start at a source");
    if (!is_sink[path.nodes.back()]) fail(tag + ": does not end at a sink");
    if (path.source_index < 0 ||
        path.source_index >= static_cast<int>(dag.sources.size()) ||
        dag.sources[path.source_index] != path.nodes.front())
      fail(tag + ": source index does not match the first node");
    if (path.sink_index < 0 ||
        path.sink_index >= static_cast<int>(dag.sinks.size()) ||
        dag.sinks[path.sink_index] != path.nodes.back())
      fail(tag + ": sink index does not match the last node");
    // Labels must be consistent with the emitting source; the sink digit is
    // informational (any message of that source may ride the path).
    std::string expect_prefix = "W" + std::to_string(path.source_index + 1);
    if (path.message.rfind(expect_prefix, 0) != 0)
      fail(tag + ": message label does not name source " +
           std::to_string(path.source_index + 1));
    bool contiguous = true;
    for (size_t i = 0; i + 1 < path.nodes.size(); ++i) {
      auto it = arcs_by_pair.find({path.nodes[i], path.nodes[i + 1]});
      if (it == arcs_by_pair.end()) {
        fail(tag + ": hop " + std::to_string(i) + " uses a missing arc");
        contiguous = false;
        break;
      }
      load[it->second.front()] += path.rate;
    }
    if (contiguous && path.rate > 0) total += path.rate;
  }
  if (total != solution.sum_rate)
    fail("path rates sum to " + to_string(total) + ", expected " +
         to_string(solution.sum_rate));

  // Capacity constraints.  Parallel arcs share the first id when
  // re-accumulating, so compare against the pair's joint capacity.
  for (const auto& [pair, ids] : arcs_by_pair) {
    Rational cap(0), used(0);
    for (int k : ids) {
      cap += dag.arcs[k].capacity;
      used += load[k];
    }
    if (used > cap)
      fail("capacity exceeded on " + dag.names[pair.first] + " -> " +
           dag.names[pair.second] + ": " + to_string(used) + " > " +
           to_string(cap));
  }

  // The cut certificate must separate and match the achieved rate.
  {
    std::vector<char> side(dag.node_count, 0);
    for (int v : solution.cut_source_side) {
      if (v < 0 || v >= dag.node_count) {
        fail("cut lists an unknown node");
        continue;
      }
      side[v] = 1;
    }
    bool ok = true;
    for (int s : dag.sources)
      if (!side[s]) {
        fail("cut does not keep source " + dag.names[s] + " on the near side");
        ok = false;
      }
    for (int t : dag.sinks)
      if (side[t]) {
        fail("cut does not separate sink " + dag.names[t]);
        ok = false;
      }
    if (ok) {
      Rational crossing(0);
      std::set<int> listed(solution.cut_arcs.begin(),
                           solution.cut_arcs.end());
      for (size_t k = 0; k < dag.arcs.size(); ++k) {
        bool crosses = side[dag.arcs[k].from] && !side[dag.arcs[k].to];
        if (crosses) crossing += dag.arcs[k].capacity;
        if (crosses != (listed.count(static_cast<int>(k)) > 0))
          fail("cut arc list disagrees with the bipartition at arc " +
               std::to_string(k));
      }
      if (crossing != solution.cut_value)
        fail("cut value mismatch: " + to_string(crossing) + " vs " +
             to_string(solution.cut_value));
      if (solution.cut_value != solution.sum_rate)
        fail("max-flow " + to_string(solution.sum_rate) +
             " does not meet the cut " + to_string(solution.cut_value));
    }
  }
  check.passed = check.failures.empty();
  return check;
}

Rational brute_force_min_cut(const WiredDag& dag) {
  std::vector<int> free_nodes;
  std::vector<int> fixed_side(dag.node_count, -1);  // 1 = source side
  for (int s : dag.sources) fixed_side[s] = 1;
  for (int t : dag.sinks) {
    if (fixed_side[t] == 1)
      throw FlowError("a node is both source and sink");
    fixed_side[t] = 0;
  }
  for (int v = 0; v < dag.node_count; ++v)
    if (fixed_side[v] < 0) free_nodes.push_back(v);
  if (free_nodes.size() > 24) throw FlowError("brute force limited to 24 free nodes");
  Rational best(-1);
  for (uint64_t mask = 0; mask < (1ull << free_nodes.size()); ++mask) {
    std::vector<char> side(dag.node_count, 0);
    for (int v = 0; v < dag.node_count; ++v)
      if (fixed_side[v] == 1) side[v] = 1;
    for (size_t i = 0; i < free_nodes.size(); ++i)
      if ((mask >> i) & 1ull) side[free_nodes[i]] = 1;
    Rational value(0);
    for (const auto& a : dag.arcs)
      if (side[a.from] && !side[a.to]) value += a.capacity;
    if (best < 0 || value < best) best = value;
  }
  return best;
}

}  // namespace xnet
