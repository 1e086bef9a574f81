#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "xnet/bounds.hpp"
#include "xnet/network.hpp"

using namespace xnet;

namespace {

LayeredNetwork load(const std::string& name) {
  std::ifstream in(std::string(XNET_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str()).network;
}

// Coefficient row as a compact comparable tuple.
using Row = std::array<long, 5>;  // a11, a12, a21, a22, rhs

Row row_of(const DofInequality& q) {
  Row r{};
  for (int k = 0; k < 4; ++k) {
    REQUIRE(q.coeffs[k].get_den() == 1);
    r[k] = q.coeffs[k].get_num().get_si();
  }
  REQUIRE(q.rhs.get_den() == 1);
  r[4] = q.rhs.get_num().get_si();
  return r;
}

std::set<Row> rows_of(const std::vector<DofInequality>& qs) {
  std::set<Row> out;
  for (const DofInequality& q : qs) out.insert(row_of(q));
  return out;
}

// Independent float LP: enumerate all square subsystems, keep feasible
// vertices, return the best objective.  Slow and sloppy on purpose -- it
// shares no code with the exact solver.
double float_max_sum(const std::vector<DofInequality>& qs,
                     const std::array<bool, 4>& absent = {false, false, false,
                                                          false}) {
  std::vector<Eigen::Vector4d> rows;
  std::vector<double> rhs;
  for (const DofInequality& q : qs) {
    Eigen::Vector4d a;
    for (int k = 0; k < 4; ++k) a(k) = to_double(q.coeffs[k]);
    rows.push_back(a);
    rhs.push_back(to_double(q.rhs));
  }
  for (int k = 0; k < 4; ++k) {
    Eigen::Vector4d a = Eigen::Vector4d::Zero();
    a(k) = -1.0;  // -d_k <= 0
    rows.push_back(a);
    rhs.push_back(0.0);
    if (absent[k]) {
      a(k) = 1.0;  // d_k <= 0, together forcing d_k = 0
      rows.push_back(a);
      rhs.push_back(0.0);
    }
  }
  const int n = static_cast<int>(rows.size());
  double best = -1.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
          Eigen::Matrix4d M;
          M.row(0) = rows[a];
          M.row(1) = rows[b];
          M.row(2) = rows[c];
          M.row(3) = rows[d];
          Eigen::Vector4d v(rhs[a], rhs[b], rhs[c], rhs[d]);
          Eigen::FullPivLU<Eigen::Matrix4d> lu(M);
          if (lu.rank() < 4) continue;
          Eigen::Vector4d x = lu.solve(v);
          bool ok = true;
          for (int r = 0; r < n && ok; ++r)
            if (rows[r].dot(x) > rhs[r] + 1e-7) ok = false;
          if (ok) best = std::max(best, x.sum());
        }
  return best;
}

}  // namespace

TEST_CASE("single-antenna family is the fixed four-row system") {
  std::set<Row> got = rows_of(single_antenna_bounds());
  std::set<Row> want = {{1, 1, 0, 0, 1},
                        {0, 0, 1, 1, 1},
                        {1, 0, 1, 0, 1},
                        {0, 1, 0, 1, 1}};
  CHECK(got == want);
}

TEST_CASE("decode-chain emissions on the word fixtures") {
  // Coefficient masks are frozen; they determine the 3/2 optima below.
  CHECK(rows_of(decode_chain_bounds(load("xz_2hop.net"))) ==
        std::set<Row>{{1, 0, 1, 1, 1}, {1, 1, 1, 0, 1}});
  CHECK(rows_of(decode_chain_bounds(load("zs_2hop.net"))) ==
        std::set<Row>{{0, 1, 1, 1, 1}, {1, 1, 0, 1, 1}, {1, 0, 1, 1, 1}});
  CHECK(rows_of(decode_chain_bounds(load("zzx_3hop.net"))) ==
        std::set<Row>{{1, 0, 1, 1, 1}, {0, 1, 1, 1, 1}});
  CHECK(rows_of(decode_chain_bounds(load("five_thirds.net"))) ==
        std::set<Row>{{1, 0, 1, 1, 1}});
}

TEST_CASE("genie certificate fires exactly on the five-thirds shape") {
  std::vector<DofInequality> g = genie_bounds(load("five_thirds.net"));
  REQUIRE(g.size() == 1);
  CHECK(row_of(g[0]) == Row{1, 1, 2, 1, 2});
  CHECK(g[0].rule == "GENIE_CERT");

  CHECK(genie_bounds(load("xz_2hop.net")).empty());
  CHECK(genie_bounds(load("layered_general.net")).empty());

  // Swapping the sink labels permutes the certificate coefficients.
  LayeredNetwork swapped = load("five_thirds.net");
  for (Edge& e : swapped.edges)
    if (e.hop == 2) e.rx = 1 - e.rx;
  std::sort(swapped.edges.begin(), swapped.edges.end(),
            [](const Edge& a, const Edge& b) {
              if (a.hop != b.hop) return a.hop < b.hop;
              if (a.tx != b.tx) return a.tx < b.tx;
              return a.rx < b.rx;
            });
  g = genie_bounds(swapped);
  REQUIRE(g.size() == 1);
  CHECK(row_of(g[0]) == Row{1, 1, 1, 2, 2});
}

TEST_CASE("LP optima for the frozen fixtures") {
  LpResult lp = max_sum_dof(single_antenna_bounds());
  CHECK(lp.optimum == make_rational(2));
  // Several corners attain 2; the solver must return one of them exactly.
  Rational vsum = 0;
  for (const Rational& v : lp.vertex) {
    CHECK(v >= 0);
    CHECK(v <= 1);
    vsum += v;
  }
  CHECK(vsum == make_rational(2));

  CHECK(outer_bound(load("xz_2hop.net")).lp.optimum == make_rational(3, 2));
  CHECK(outer_bound(load("zzx_3hop.net")).lp.optimum == make_rational(3, 2));
  CHECK(outer_bound(load("zs_2hop.net")).lp.optimum == make_rational(3, 2));

  BoundReport ft = outer_bound(load("five_thirds.net"));
  CHECK(ft.lp.optimum == make_rational(5, 3));
  CHECK(ft.lp.vertex == std::array<Rational, 4>{
                            make_rational(1, 3), make_rational(2, 3),
                            make_rational(1, 3), make_rational(1, 3)});
}

TEST_CASE("LP vertex is feasible and matches the optimum exactly") {
  for (const char* f : {"xz_2hop.net", "zs_2hop.net", "zzx_3hop.net",
                        "five_thirds.net", "layered_general.net"}) {
    CAPTURE(f);
    BoundReport rep = outer_bound(load(f));
    Rational sum = 0;
    for (int k = 0; k < 4; ++k) {
      CHECK(rep.lp.vertex[k] >= 0);
      if (rep.absent[k]) CHECK(rep.lp.vertex[k] == 0);
      sum += rep.lp.vertex[k];
    }
    CHECK(sum == rep.lp.optimum);
    for (const DofInequality& q : rep.inequalities) {
      Rational lhs = 0;
      for (int k = 0; k < 4; ++k) lhs += q.coeffs[k] * rep.lp.vertex[k];
      CHECK(lhs <= q.rhs);
    }
  }
}

TEST_CASE("absent messages are eliminated as variables") {
  // All-Z two-hop word: s2 never reaches d1, so d21 is forced to zero.
  LayeredNetwork zz =
      parse_network(
          "layers: [2, 2, 2]\n"
          "edge 1 1 1\nedge 1 1 2\nedge 1 2 2\n"
          "edge 2 1 1\nedge 2 1 2\nedge 2 2 2\n")
          .network;
  std::array<bool, 4> absent = absent_messages(zz);
  CHECK(absent == std::array<bool, 4>{false, false, true, false});
  BoundReport rep = outer_bound(zz);
  CHECK(rep.lp.vertex[2] == 0);
  CHECK(rep.lp.optimum == make_rational(2));

  // Direct elimination on a hand-rolled system: with d12 pinned to zero the
  // best corner moves.
  std::vector<DofInequality> qs = single_antenna_bounds();
  LpResult lp = max_sum_dof(qs, {false, true, false, false});
  CHECK(lp.vertex[1] == 0);
  CHECK(lp.optimum == make_rational(2));  // (1,0,0,1) still feasible
  lp = max_sum_dof(qs, {true, true, false, false});
  CHECK(lp.optimum == make_rational(1));  // only s2's messages remain
  lp = max_sum_dof(qs, {true, true, true, true});
  CHECK(lp.optimum == 0);
}

TEST_CASE("adding an inequality never raises the optimum") {
  std::vector<DofInequality> qs = single_antenna_bounds();
  Rational prev = max_sum_dof(qs).optimum;
  std::vector<DofInequality> extra = decode_chain_bounds(load("zs_2hop.net"));
  for (const DofInequality& q : extra) {
    qs.push_back(q);
    Rational now = max_sum_dof(qs).optimum;
    CHECK(now <= prev);
    prev = now;
  }
  CHECK(prev == make_rational(3, 2));
}

TEST_CASE("exact LP agrees with an independent float enumerator") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coeff(0, 3);
  std::uniform_int_distribution<int> rhs(1, 4);
  for (int trial = 0; trial < 60; ++trial) {
    CAPTURE(trial);
    std::vector<DofInequality> qs = single_antenna_bounds();
    int extra = 1 + trial % 5;
    for (int e = 0; e < extra; ++e) {
      DofInequality q;
      bool nonzero = false;
      for (int k = 0; k < 4; ++k) {
        int c = coeff(rng);
        q.coeffs[k] = c;
        nonzero = nonzero || c != 0;
      }
      if (!nonzero) q.coeffs[trial % 4] = 1;
      q.rhs = rhs(rng);
      q.rule = "SINGLE_ANTENNA";  // rule tag is irrelevant to the solver
      qs.push_back(q);
    }
    std::array<bool, 4> absent{};
    if (trial % 7 == 0) absent[trial % 4] = true;
    LpResult lp = max_sum_dof(qs, absent);
    double exact = to_double(lp.optimum);
    double approx = float_max_sum(qs, absent);
    CHECK(std::abs(exact - approx) < 1e-6);
  }
}

TEST_CASE("unbounded systems are rejected") {
  std::vector<DofInequality> qs;
  DofInequality only;
  only.coeffs = {1, 0, 0, 0};
  only.rhs = 1;
  only.rule = "SINGLE_ANTENNA";
  qs.push_back(only);
  CHECK_THROWS_AS(max_sum_dof(qs), std::runtime_error);
  // Eliminating every unconstrained variable restores boundedness.
  LpResult lp = max_sum_dof(qs, {false, true, true, true});
  CHECK(lp.optimum == 1);
}
