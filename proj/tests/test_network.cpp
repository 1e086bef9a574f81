#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "xnet/network.hpp"

using namespace xnet;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(XNET_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse a minimal wireless network") {
  ParseResult pr = parse_network(
      "layers: [2, 2]\n"
      "mode: wireless\n"
      "edge 1 1 1\n"
      "edge 1 1 2\n"
      "edge 1 2 1\n"
      "edge 1 2 2\n");
  CHECK(pr.network.layers == std::vector<int>{2, 2});
  CHECK(pr.network.mode == NetMode::Wireless);
  CHECK(pr.network.edges.size() == 4);
  CHECK(pr.warnings.empty());
  CHECK(pr.network.has_edge(0, 0, 0));
  CHECK(pr.network.has_edge(0, 1, 1));
  CHECK_FALSE(pr.network.has_edge(0, 2, 0));
}

TEST_CASE("mode defaults to wireless and comments are ignored") {
  ParseResult pr = parse_network(
      "# comment line\n"
      "layers: [2, 2]\n"
      "edge 1 1 1  # trailing comment\n"
      "edge 1 1 2\n"
      "edge 1 2 1\n"
      "edge 1 2 2\n"
      "\n");
  CHECK(pr.network.mode == NetMode::Wireless);
  CHECK(pr.network.edges.size() == 4);
}

TEST_CASE("pinned coefficients and link syntax") {
  ParseResult pr = parse_network(
      "layers: [2, 2, 2]\n"
      "mode: wireless\n"
      "edge 1 1 1 0.5 -1.25\n"
      "link s1 v1.2\n"
      "link s2 v1.2\n"
      "link v1.1 d1\n"
      "edge 2 2 2\n"
      "link v1.2 d1\n");
  const Edge* e = pr.network.find_edge(0, 0, 0);
  REQUIRE(e != nullptr);
  REQUIRE(e->coeff.has_value());
  CHECK(e->coeff->real() == 0.5);
  CHECK(e->coeff->imag() == -1.25);
  CHECK(pr.network.has_edge(0, 0, 1));  // link s1 v1.2
  CHECK(pr.network.has_edge(1, 1, 0));  // link v1.2 d1
  CHECK(pr.network.edges.size() == 6);
}

TEST_CASE("parse errors carry a reason") {
  // Non-layered link: endpoints must sit in adjacent layers.
  CHECK_THROWS_WITH_AS(
      parse_network("layers: [2, 2, 2]\nlink s1 d1\n"
                    "edge 1 1 1\nedge 1 2 2\nedge 2 1 1\nedge 2 2 2\n"),
      doctest::Contains("non-layered"), ParseError);
  // Zero wireless coefficient is a measure-zero pin we refuse.
  CHECK_THROWS_WITH_AS(
      parse_network("layers: [2, 2]\nedge 1 1 1 0 0\n"
                    "edge 1 1 2\nedge 1 2 1\nedge 1 2 2\n"),
      doctest::Contains("zero"), ParseError);
  // Nonpositive wired capacity.
  CHECK_THROWS_WITH_AS(
      parse_network("layers: [2, 2]\nmode: wired\nedge 1 1 1 -1/2\n"),
      doctest::Contains("capacity"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_network("layers: [2, 2]\nmode: wired\nedge 1 1 1 0\n"),
      doctest::Contains("capacity"), ParseError);
  // Duplicate edge.
  CHECK_THROWS_WITH_AS(
      parse_network("layers: [2, 2]\nedge 1 1 1\nedge 1 1 1\n"
                    "edge 1 2 2\nedge 1 1 2\nedge 1 2 1\n"),
      doctest::Contains("duplicate"), ParseError);
  // Out-of-range node index.
  CHECK_THROWS_AS(parse_network("layers: [2, 2]\nedge 1 3 1\n"), ParseError);
  CHECK_THROWS_AS(parse_network("layers: [2, 2]\nedge 2 1 1\n"), ParseError);
  // Wireless mode needs exactly 2 sources and 2 sinks.
  CHECK_THROWS_AS(parse_network("layers: [3, 2]\nedge 1 1 1\nedge 1 2 2\n"
                                "edge 1 3 2\nedge 1 1 2\n"),
                  ParseError);
  // Unknown mode / missing layers / garbage.
  CHECK_THROWS_AS(parse_network("layers: [2, 2]\nmode: optical\nedge 1 1 1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_network("edge 1 1 1\n"), ParseError);
  CHECK_THROWS_AS(parse_network("layers: [2, 2]\nfrobnicate\n"), ParseError);
  // Wired capacity must be rational, not decimal.
  CHECK_THROWS_AS(
      parse_network("layers: [2, 2]\nmode: wired\nedge 1 1 1 0.5\n"),
      ParseError);
}

TEST_CASE("off-path relays are pruned with warnings") {
  ParseResult pr = parse_network(
      "layers: [2, 3, 2]\n"
      "edge 1 1 1\n"
      "edge 1 2 2\n"
      "edge 2 1 1\n"
      "edge 2 2 2\n"
      "edge 1 1 3\n");  // v1.3 has no outgoing edge: dead end
  CHECK(pr.network.layers == std::vector<int>{2, 2, 2});
  REQUIRE(pr.warnings.size() == 1);
  CHECK(pr.warnings[0].message.find("v1.3") != std::string::npos);
  // Remaining edges were reindexed consistently.
  CHECK(pr.network.has_edge(0, 0, 0));
  CHECK(pr.network.has_edge(0, 1, 1));
  CHECK(pr.network.has_edge(1, 0, 0));
  CHECK(pr.network.has_edge(1, 1, 1));
  CHECK(pr.network.edges.size() == 4);
}

TEST_CASE("pruning reindexes later relays in the same layer") {
  ParseResult pr = parse_network(
      "layers: [2, 3, 2]\n"
      "edge 1 1 2\n"   // v1.2 is a dead end (no outgoing edge)
      "edge 1 1 1\n"
      "edge 1 2 3\n"
      "edge 2 1 1\n"
      "edge 2 3 2\n");
  CHECK(pr.network.layers == std::vector<int>{2, 2, 2});
  REQUIRE(pr.warnings.size() == 1);
  CHECK(pr.warnings[0].message.find("v1.2") != std::string::npos);
  // v1.3 became v1.2.
  CHECK(pr.network.has_edge(0, 1, 1));
  CHECK(pr.network.has_edge(1, 1, 1));
}

TEST_CASE("serialize round-trips every fixture") {
  const char* fixtures[] = {
      "x_single_hop.net", "xz_2hop.net",   "xzz_3hop.net",
      "zs_2hop.net",      "zzx_3hop.net",  "zsz_3hop.net",
      "zxz_3hop.net",     "five_thirds.net", "layered_general.net",
      "two_relay_chain.net", "wired_diamond.net", "wired_bottleneck.net"};
  for (const char* name : fixtures) {
    CAPTURE(name);
    ParseResult a = parse_network(slurp(name));
    std::string doc = serialize(a.network);
    ParseResult b = parse_network(doc);
    CHECK(a.network.layers == b.network.layers);
    CHECK(a.network.mode == b.network.mode);
    REQUIRE(a.network.edges.size() == b.network.edges.size());
    for (std::size_t i = 0; i < a.network.edges.size(); ++i) {
      const Edge& ea = a.network.edges[i];
      const Edge& eb = b.network.edges[i];
      CHECK(ea == eb);  // (hop, tx, rx) triple equality
      CHECK(ea.coeff.has_value() == eb.coeff.has_value());
      if (ea.coeff) CHECK(*ea.coeff == *eb.coeff);
      CHECK(ea.capacity.has_value() == eb.capacity.has_value());
      if (ea.capacity) CHECK(*ea.capacity == *eb.capacity);
    }
    // Serialization is a fixpoint.
    CHECK(serialize(b.network) == doc);
  }
}

TEST_CASE("neighbor queries and node names") {
  ParseResult pr = parse_network(slurp("five_thirds.net"));
  const LayeredNetwork& net = pr.network;
  CHECK(net.hop_count() == 3);
  CHECK(net.node_name({0, 0}) == "s1");
  CHECK(net.node_name({1, 2}) == "v1.3");
  CHECK(net.node_name({3, 1}) == "d2");
  CHECK(net.rx_neighbors(0, 0) == std::vector<int>{0, 1});
  CHECK(net.rx_neighbors(0, 1) == std::vector<int>{2});
  CHECK(net.tx_neighbors(1, 0) == std::vector<int>{0, 2});
  CHECK(net.tx_neighbors(2, 0) == std::vector<int>{0});
  CHECK(net.tx_neighbors(2, 1) == std::vector<int>{1, 2});
}

TEST_CASE("path_count matches the letter-matrix product") {
  // ZSZ: A*B*A = [[2,3],[1,2]] with A=[[1,1],[0,1]], B=[[1,0],[1,1]].
  ParseResult pr = parse_network(slurp("zsz_3hop.net"));
  CHECK(pr.network.path_count(0, 0) == 2);
  CHECK(pr.network.path_count(0, 1) == 3);
  CHECK(pr.network.path_count(1, 0) == 1);
  CHECK(pr.network.path_count(1, 1) == 2);
}

TEST_CASE("generic_min_cut equals the vertex-disjoint path bound") {
  CHECK(generic_min_cut(parse_network(slurp("x_single_hop.net")).network) == 2);
  CHECK(generic_min_cut(parse_network(slurp("two_relay_chain.net")).network) ==
        2);
  CHECK(generic_min_cut(parse_network(slurp("five_thirds.net")).network) == 2);
  // Hourglass: all traffic squeezes through one middle relay.
  ParseResult hour = parse_network(
      "layers: [2, 1, 2]\n"
      "edge 1 1 1\nedge 1 2 1\nedge 2 1 1\nedge 2 1 2\n");
  CHECK(generic_min_cut(hour.network) == 1);
  // Disconnected terminals.
  LayeredNetwork empty;
  empty.layers = {2, 2};
  empty.mode = NetMode::Wireless;
  CHECK(generic_min_cut(empty) == 0);
}
