#include <doctest.h>

#include <cmath>
#include <vector>

#include "nlbranch/errors.hpp"
#include "nlbranch/motion.hpp"

using namespace nlbranch;

namespace {

const Domain unit = Domain::interval(0.0, 1.0);
const Domain square = Domain::box(Point{0.0, 0.0}, Point{1.0, 1.0});

}  // namespace

TEST_CASE("translation entry time") {
  const Flow f = Flow::translation(Point{1.0});
  CHECK(flow_entry_time(f, unit, Point{0.3}, 10.0).exit_time == doctest::Approx(0.7));
  const ExitRecord at = flow_entry_time(f, unit, Point{1.0}, 10.0);
  CHECK(at.exit_time == 0.0);
  CHECK(at.exit_point == Point{1.0});
}

TEST_CASE("product of translations exits at the first coordinate to leave") {
  const Flow f = Flow::product({Flow::translation(Point{1.0}), Flow::translation(Point{1.0})});
  const ExitRecord rec = flow_entry_time(f, square, Point{0.3, 0.6}, 10.0);
  CHECK(rec.exit_time == doctest::Approx(0.4));
  CHECK(rec.exit_point[0] == doctest::Approx(0.7));
  CHECK(rec.exit_point[1] == doctest::Approx(1.0));
}

TEST_CASE("vector field entry time by scan and bisection") {
  // x' = 1 + x on (0, 1): tau(x) = log(2 / (1 + x)).
  const Flow f = Flow::vector_field([](const Point& x) { return Point{1.0 + x[0]}; }, 1, 1e-3);
  for (double x : {0.1, 0.25, 0.9}) {
    const ExitRecord rec = flow_entry_time(f, unit, Point{x}, 10.0);
    CHECK(rec.exit_time == doctest::Approx(std::log(2.0 / (1.0 + x))).epsilon(1e-9));
    CHECK(rec.exit_point[0] == doctest::Approx(1.0));
  }
}

TEST_CASE("a flow that never exits is an error") {
  const Flow still = Flow::translation(Point{0.0});
  CHECK_THROWS_AS((void)flow_entry_time(still, unit, Point{0.5}, 5.0), UnboundedEntryTimeError);
}

TEST_CASE("stopped flow steps") {
  const Flow f = Flow::translation(Point{1.0});
  CHECK(flow_step(f, unit, Point{0.3}, 0.2, 10.0)[0] == doctest::Approx(0.5));
  CHECK(flow_step(f, unit, Point{0.3}, 5.0, 10.0) == Point{1.0});
  CHECK(flow_step(f, unit, Point{0.3}, 0.0, 10.0) == Point{0.3});
}

TEST_CASE("flow law and absorption") {
  const Flow f = Flow::vector_field([](const Point& x) { return Point{0.5 + x[0] * x[0]}; }, 1, 1e-3);
  const Point x{0.1};
  const Point two = flow_step(f, unit, flow_step(f, unit, x, 0.3, 10.0), 0.4, 10.0);
  const Point one = flow_step(f, unit, x, 0.7, 10.0);
  CHECK(two[0] == doctest::Approx(one[0]).epsilon(1e-9));
  const Point end = flow_step(f, unit, x, 50.0, 10.0);
  CHECK(end == Point{1.0});
  CHECK(flow_step(f, unit, end, 3.0, 10.0) == end);
}

TEST_CASE("entry time vanishes at the outflow face") {
  const Flow f = Flow::product({Flow::translation(Point{1.0}), Flow::translation(Point{0.5})});
  double prev = 1e9;
  for (double d = 0.1; d > 1e-6; d /= 10.0) {
    const double tau = flow_entry_time(f, square, Point{1.0 - d, 0.3}, 10.0).exit_time;
    CHECK(tau <= d + 1e-15);
    CHECK(tau < prev);
    prev = tau;
  }
  CHECK(entry_time_bound(f, square).value() == doctest::Approx(1.0));
}

TEST_CASE("flow killing integral is exact for a constant rate") {
  const Flow f = Flow::translation(Point{2.0});
  const ExitRecord rec = flow_path_to_exit(f, unit, KillingRate::constant_on_D(0.7), Point{0.2}, 10.0, 1e-3);
  CHECK(rec.exit_time == doctest::Approx(0.4));
  CHECK(rec.path_integral_c == doctest::Approx(0.28));
}

TEST_CASE("brownian path started on the boundary") {
  RandomStream rng(1, 0);
  const ExitRecord rec =
      brownian_path_to_exit(BrownianMotion{1e-3}, unit, KillingRate::constant_on_D(1.0), Point{1.0}, rng, Caps{});
  CHECK(rec.exit_time == 0.0);
  CHECK(rec.exit_point == Point{1.0});
}

TEST_CASE("brownian exit statistics on the unit interval") {
  // Generator is the Laplacian: E tau = x (1 - x) / 2 and P(exit at 0) = 1 - x.
  const std::size_t n = 20000;
  const BrownianMotion bm{1e-4};
  const KillingRate c = KillingRate::constant_on_D(0.0);
  const Caps caps{};

  std::vector<double> times;
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng(11, i);
    times.push_back(brownian_path_to_exit(bm, unit, c, Point{0.5}, rng, caps).exit_time);
  }
  double mean = 0.0, sq = 0.0;
  for (double t : times) mean += t;
  mean /= n;
  for (double t : times) sq += (t - mean) * (t - mean);
  const double se = std::sqrt(sq / (n - 1) / n);
  CHECK(std::abs(mean - 0.125) <= 4.0 * se + 2e-3);

  std::size_t left = 0;
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng(12, i);
    const ExitRecord rec = brownian_path_to_exit(bm, unit, c, Point{0.25}, rng, caps);
    CHECK(unit.on_boundary(rec.exit_point));
    if (rec.exit_point[0] == 0.0) ++left;
  }
  const double p = double(left) / n;
  CHECK(std::abs(p - 0.75) <= 4.0 * std::sqrt(0.75 * 0.25 / n));
}

TEST_CASE("time cap flags a truncated record") {
  RandomStream rng(3, 0);
  Caps caps;
  caps.time_cap = 1e-3;
  const ExitRecord rec =
      brownian_path_to_exit(BrownianMotion{1e-4}, unit, KillingRate::constant_on_D(0.0), Point{0.5}, rng, caps);
  CHECK(rec.truncated);
}
