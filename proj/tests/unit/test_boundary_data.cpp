#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlbranch/boundary_data.hpp"
#include "nlbranch/errors.hpp"

using namespace nlbranch;

TEST_CASE("arc indicator on the unit circle") {
  const Domain disk = Domain::ball(Point{0.0, 0.0}, 1.0);
  const BoundaryData phi = BoundaryData::arc_indicator(0.0, std::numbers::pi);
  CHECK(phi.eval_on_E(disk, Point{0.0, 1.0}) == 1.0);
  CHECK(phi.eval_on_E(disk, Point{0.0, -1.0}) == 0.0);
  CHECK(phi.eval_on_E(disk, Point{0.0, 0.0}) == 0.0);
  for (int i = 0; i < 64; ++i) {
    const double th = 2.0 * std::numbers::pi * (i + 0.5) / 64.0;
    const double v = phi.eval_on_E(disk, Point{std::cos(th), std::sin(th)});
    CHECK((v == 0.0 || v == 1.0));
  }
  const auto jumps = phi.jump_set(disk);
  REQUIRE(jumps.size() == 2);
  CHECK(distance(jumps[0], Point{1.0, 0.0}) < 1e-12);
  CHECK(distance(jumps[1], Point{-1.0, 0.0}) < 1e-12);
}

TEST_CASE("interval endpoints and zero extension") {
  const Domain iv = Domain::interval(0.0, 1.0);
  const BoundaryData phi = BoundaryData::interval_endpoints(0.2, 0.8);
  CHECK(phi.eval_on_E(iv, Point{1.0}) == 0.8);
  CHECK(phi.eval_on_E(iv, Point{0.0}) == 0.2);
  CHECK(phi.eval_on_E(iv, Point{0.5}) == 0.0);
  CHECK(phi.sup_bound() == 0.8);
  CHECK(phi.jump_set(iv).empty());
  CHECK_THROWS_AS((void)phi.eval_on_E(iv, Point{1.5}), OutsideClosureError);
}

TEST_CASE("sup bound must dominate the data") {
  CHECK_THROWS((void)BoundaryData::interval_endpoints(0.2, 0.8).with_sup_bound(0.5));
  CHECK(BoundaryData::constant(0.4).with_sup_bound(1.0).sup_bound() == 1.0);
  CHECK_THROWS((void)BoundaryData::constant(-0.1));
}

TEST_CASE("tabulated data uses the nearest sample") {
  const Domain box = Domain::box(Point{0.0, 0.0}, Point{1.0, 1.0});
  const BoundaryData phi = BoundaryData::tabulated({{Point{0.0, 0.5}, 0.3}, {Point{1.0, 0.5}, 0.7}});
  CHECK(phi.eval_on_E(box, Point{0.0, 0.9}) == 0.3);
  CHECK(phi.eval_on_E(box, Point{1.0, 0.1}) == 0.7);
  CHECK(phi.eval_on_E(box, Point{0.5, 0.5}) == 0.0);
  CHECK(phi.sup_bound() == 0.7);
}

TEST_CASE("values stay within the sup bound") {
  const Domain disk = Domain::ball(Point{0.0, 0.0}, 2.0);
  const BoundaryData phi =
      BoundaryData::custom([](const Point& y) { return 0.5 + 0.25 * std::sin(y[0]); }, 0.75);
  for (int i = 0; i < 100; ++i) {
    const double th = 2.0 * std::numbers::pi * i / 100.0;
    const double v = phi.eval_on_E(disk, Point{2.0 * std::cos(th), 2.0 * std::sin(th)});
    CHECK(v >= 0.0);
    CHECK(v <= phi.sup_bound());
  }
}
