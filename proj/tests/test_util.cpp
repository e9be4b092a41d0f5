#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "calabi/csv.hpp"
#include "calabi/geometry.hpp"
#include "calabi/rational.hpp"
#include "calabi/svg.hpp"
#include "doctest.h"

using namespace calabi;

TEST_CASE("point_segment_distance") {
  const PlanePoint a{0, 0}, b{2, 0};
  CHECK(point_segment_distance({1, 1}, a, b) == doctest::Approx(1.0));
  CHECK(point_segment_distance({-1, 0}, a, b) == doctest::Approx(1.0));
  CHECK(point_segment_distance({3, 0}, a, b) == doctest::Approx(1.0));
  CHECK(point_segment_distance({1, 0}, a, b) == doctest::Approx(0.0));
  // Degenerate segment falls back to point distance.
  CHECK(point_segment_distance({3, 4}, a, a) == doctest::Approx(5.0));
}

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  constexpr double pi = std::numbers::pi;
  CHECK(wrap_angle(pi) == doctest::Approx(pi));
  CHECK(wrap_angle(-pi) == doctest::Approx(pi));
  CHECK(wrap_angle(3 * pi / 2) == doctest::Approx(-pi / 2));
  CHECK(wrap_angle(7 * pi) == doctest::Approx(pi));
  for (double t = -20; t < 20; t += 0.37) {
    const double w = wrap_angle(t);
    CHECK(w > -pi - 1e-15);
    CHECK(w <= pi + 1e-15);
    CHECK(std::abs(std::sin(w) - std::sin(t)) < 1e-12);
    CHECK(std::abs(std::cos(w) - std::cos(t)) < 1e-12);
  }
}

TEST_CASE("window containment and diagonal") {
  const Window w{-1, 2, 0, 4};
  CHECK(w.contains({0, 1}));
  CHECK(w.contains({-1, 0}));
  CHECK_FALSE(w.contains({-1.01, 0}));
  CHECK_FALSE(w.contains({0, 4.5}));
  CHECK(w.diagonal() == doctest::Approx(5.0));
}

TEST_CASE("best_rational convergents") {
  const Fraction f = best_rational(std::numbers::pi, 1000);
  CHECK(f.num == 355);
  CHECK(f.den == 113);
  const Fraction g = best_rational(-0.75, 100);
  CHECK(g.num == -3);
  CHECK(g.den == 4);
  const Fraction h = best_rational(4.0, 10);
  CHECK(h.num == 4);
  CHECK(h.den == 1);
}

TEST_CASE("reconstruct_rational accepts terminating expansions") {
  auto r = reconstruct_rational(0.75, 1000);
  REQUIRE(r.has_value());
  CHECK(r->num == 3);
  CHECK(r->den == 4);

  r = reconstruct_rational(4.0, 1000);
  REQUIRE(r.has_value());
  CHECK(r->num == 4);
  CHECK(r->den == 1);

  r = reconstruct_rational(-22.0 / 7.0, 1000);
  REQUIRE(r.has_value());
  CHECK(r->num == -22);
  CHECK(r->den == 7);

  // 1/3 is not dyadic; the double is within 1e-9 of the true fraction and the
  // expansion terminates there.
  r = reconstruct_rational(1.0 / 3.0, 1000);
  REQUIRE(r.has_value());
  CHECK(r->num == 1);
  CHECK(r->den == 3);
}

TEST_CASE("reconstruct_rational rejects irrationals") {
  // 2 sqrt(2): convergents keep improving without terminating before the
  // denominator bound, so no rational is reported.
  CHECK_FALSE(reconstruct_rational(2.0 * std::sqrt(2.0), 1000000).has_value());
  CHECK_FALSE(reconstruct_rational(std::numbers::pi, 1000000).has_value());
  CHECK_FALSE(reconstruct_rational(std::numbers::sqrt3, 1000).has_value());
  // Denominator bound respected: 1/1009 is rational but out of bounds.
  CHECK_FALSE(reconstruct_rational(1.0 / 1009.0, 1000).has_value());
}

TEST_CASE("format_double round-trips exactly") {
  const double samples[] = {0.0,   1.0,    -1.0,        0.1,   std::numbers::pi,
                            1e300, 1e-300, -12345.6789, 2.0 / 3.0};
  for (const double v : samples) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("csv writer layout") {
  std::ostringstream os;
  CsvWriter w(os);
  w.header({"a", "b", "c"});
  w.add(1.5).add(2LL).add(std::string("x")).end_row();
  w.add(-0.25).add(0LL).add(std::string("y")).end_row();
  CHECK(os.str() == "a,b,c\n1.5,2,x\n-0.25,0,y\n");
}

TEST_CASE("svg output is deterministic and self-contained") {
  SvgSeries s;
  s.points = {{0, 0}, {1, 1}, {2, 0.5}};
  SvgOptions opts;
  opts.title = "demo";
  std::ostringstream a, b;
  write_svg_plot(a, {s}, opts);
  write_svg_plot(b, {s}, opts);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("<svg") != std::string::npos);
  CHECK(a.str().find("</svg>") != std::string::npos);
  CHECK(a.str().find("calabi svg v1") != std::string::npos);
  CHECK(a.str().find("demo") != std::string::npos);
  // No external references beyond the xmlns identifier.
  CHECK(a.str().find("<script") == std::string::npos);
  CHECK(a.str().find("href=\"http") == std::string::npos);
  CHECK(a.str().find("@import") == std::string::npos);
}
