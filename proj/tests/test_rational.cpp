#include <doctest.h>

#include "xnet/rational.hpp"

using namespace xnet;

TEST_CASE("parse_rational accepts canonical and reducible forms") {
  auto q = parse_rational("3/2");
  REQUIRE(q.has_value());
  CHECK(*q == make_rational(3, 2));

  q = parse_rational("7/21");
  REQUIRE(q.has_value());
  CHECK(*q == make_rational(1, 3));
  CHECK(to_string(*q) == "1/3");

  q = parse_rational("2");
  REQUIRE(q.has_value());
  CHECK(*q == make_rational(2));
  CHECK(to_string(*q) == "2");

  q = parse_rational("0");
  REQUIRE(q.has_value());
  CHECK(*q == 0);

  q = parse_rational("-1/3");
  REQUIRE(q.has_value());
  CHECK(*q == make_rational(-1, 3));
  CHECK(to_string(*q) == "-1/3");

  q = parse_rational("+5");
  REQUIRE(q.has_value());
  CHECK(*q == 5);

  q = parse_rational("-4/6");
  REQUIRE(q.has_value());
  CHECK(to_string(*q) == "-2/3");
}

TEST_CASE("parse_rational rejects malformed input") {
  CHECK_FALSE(parse_rational("").has_value());
  CHECK_FALSE(parse_rational("/").has_value());
  CHECK_FALSE(parse_rational("1/").has_value());
  CHECK_FALSE(parse_rational("/2").has_value());
  CHECK_FALSE(parse_rational("1/2/3").has_value());
  CHECK_FALSE(parse_rational("1.5").has_value());
  CHECK_FALSE(parse_rational("a").has_value());
  CHECK_FALSE(parse_rational("1 / 2").has_value());
  CHECK_FALSE(parse_rational("2/-3").has_value());
  CHECK_FALSE(parse_rational("1/0").has_value());
  CHECK_FALSE(parse_rational("0/0").has_value());
  CHECK_FALSE(parse_rational("--2").has_value());
  CHECK_FALSE(parse_rational("0x10").has_value());
}

TEST_CASE("rational arithmetic is exact") {
  Rational a = make_rational(1, 3);
  Rational b = make_rational(1, 6);
  CHECK(a + b == make_rational(1, 2));
  CHECK(a - b == b);
  CHECK(a * b == make_rational(1, 18));
  CHECK(a / b == 2);
  CHECK(to_double(make_rational(5, 3)) == doctest::Approx(5.0 / 3.0));
  // The classic double pitfall stays exact here.
  Rational tenth = make_rational(1, 10);
  Rational sum = 0;
  for (int i = 0; i < 10; ++i) sum += tenth;
  CHECK(sum == 1);
}
