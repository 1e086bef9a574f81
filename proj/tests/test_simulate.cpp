#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "xnet/simulate.hpp"

using namespace xnet;

namespace {

LayeredNetwork load(const std::string& name) {
  std::ifstream in(std::string(XNET_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str()).network;
}

}  // namespace

TEST_CASE("parse_snr_grid expands dB ranges") {
  CHECK(parse_snr_grid("40:80:10") ==
        std::vector<double>{40, 50, 60, 70, 80});
  CHECK(parse_snr_grid("40:40:10") == std::vector<double>{40});
  CHECK(parse_snr_grid("40:75:35") == std::vector<double>{40, 75});
  CHECK(parse_snr_grid("45:46:0.5") ==
        std::vector<double>{45, 45.5, 46});
}

TEST_CASE("parse_snr_grid rejects malformed ranges") {
  for (const char* bad : {"", "40", "40:80", "40:80:0", "40:80:-5",
                          "80:40:10", "a:b:c", "40:80:10:5", "40-80-10"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_snr_grid(bad), std::invalid_argument);
  }
}

TEST_CASE("simulate_rate is deterministic in the seed") {
  LayeredNetwork net = load("xz_2hop.net");
  SchemeSpec spec;
  spec.kind = SchemeKind::XzFamily;
  RatePoint a = simulate_rate(net, spec, 60.0, 8, 99);
  RatePoint b = simulate_rate(net, spec, 60.0, 8, 99);
  RatePoint c = simulate_rate(net, spec, 60.0, 8, 100);
  CHECK(a.sum_rate == b.sum_rate);
  CHECK(a.per_message == b.per_message);
  CHECK(a.sum_rate != c.sum_rate);
  CHECK(a.trials == 8);
  CHECK(a.seed == 99);
  // Rates grow with SNR and split across the three live messages.
  RatePoint hi = simulate_rate(net, spec, 80.0, 8, 99);
  CHECK(hi.sum_rate > a.sum_rate);
  CHECK(a.per_message[0] > 0.0);
  CHECK(a.per_message[1] > 0.0);
  CHECK(a.per_message[2] == 0.0);  // W21 carries no stream in this scheme
  CHECK(a.per_message[3] > 0.0);
  double total = a.per_message[0] + a.per_message[1] + a.per_message[3];
  CHECK(std::abs(total - a.sum_rate) < 1e-9);
  CHECK_THROWS_AS(simulate_rate(net, spec, 60.0, 0, 99),
                  std::invalid_argument);
}

TEST_CASE("estimate_dof validates its grid") {
  LayeredNetwork net = load("xz_2hop.net");
  SchemeSpec spec;
  spec.kind = SchemeKind::Tdma;
  CHECK_THROWS_AS(estimate_dof(net, spec, {50.0}, 2, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_dof(net, spec, {40.0, 50.0}, 2, 1),
                  std::invalid_argument);  // span below 30 dB
  CHECK_THROWS_AS(estimate_dof(net, spec, {30.0, 70.0}, 2, 1),
                  std::invalid_argument);  // leaves the high-SNR window
  CHECK_THROWS_AS(estimate_dof(net, spec, {70.0, 110.0}, 2, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_dof(net, spec, {}, 2, 1), std::invalid_argument);
}

TEST_CASE("tdma slope estimates one degree of freedom") {
  LayeredNetwork net = load("xz_2hop.net");
  SchemeSpec spec;
  spec.kind = SchemeKind::Tdma;
  SlopeEstimate est = estimate_dof(net, spec, {40, 50, 60, 70, 80}, 10, 7);
  CHECK(est.dof_hat == doctest::Approx(1.0).epsilon(0.1));
  CHECK(est.points.size() == 5);
  CHECK(est.per_message[0] == doctest::Approx(1.0).epsilon(0.1));
  CHECK(est.per_message[1] == 0.0);
  CHECK(est.stderr_slope >= 0.0);
  CHECK(est.residual >= 0.0);
  // Seeds recorded per point are distinct, so points are independent.
  CHECK(est.points[0].seed != est.points[1].seed);
}

TEST_CASE("neutralization slope estimates two degrees of freedom") {
  LayeredNetwork net = load("zsz_3hop.net");
  SchemeSpec spec;
  spec.kind = SchemeKind::Neutralize;
  spec.kept = {MessageId{0, 1}, MessageId{1, 0}};
  SlopeEstimate est = estimate_dof(net, spec, {40, 55, 70}, 10, 7);
  CHECK(est.dof_hat == doctest::Approx(2.0).epsilon(0.08));
}
