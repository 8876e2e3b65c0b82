#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "nlbranch/errors.hpp"
#include "nlbranch/oracle.hpp"

using namespace nlbranch;

namespace {

constexpr double kPi = std::numbers::pi;

// Harmonic measure of the arc [alpha, beta] of the unit circle seen from z.
double arc_measure(double alpha, double beta, double x, double y) {
  const std::complex<double> z(x, y);
  double angle = std::arg((std::polar(1.0, beta) - z) / (std::polar(1.0, alpha) - z));
  if (angle < 0.0) angle += 2.0 * kPi;
  return angle / kPi - (beta - alpha) / (2.0 * kPi);
}

}  // namespace

TEST_CASE("grid validation") {
  Grid1D g;
  g.m = 0;
  CHECK_THROWS((void)g.validate());
  Grid1D h;
  h.b = h.a;
  CHECK_THROWS((void)h.validate());
}

TEST_CASE("Newton reproduces the linear and Feynman-Kac closed forms") {
  const Grid1D g;
  const NewtonResult lin = newton_bvp_1d(0.2, 0.8, KillingRate::constant_on_D(0.0), OffspringLaw::from_weights({}), g);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(lin.u[i] == doctest::Approx(0.2 + 0.6 * g.node(i)).epsilon(1e-12));

  // u'' = u with u = 1 at both ends: cosh(x - 1/2) / cosh(1/2).
  const NewtonResult fk = newton_bvp_1d(1.0, 1.0, KillingRate::constant_on_D(1.0), OffspringLaw::from_weights({}), g);
  for (std::size_t i = 0; i < g.size(); i += 20) {
    CHECK(std::abs(fk.u[i] - std::cosh(g.node(i) - 0.5) / std::cosh(0.5)) < 1e-5);
  }
  CHECK(expected_exp_exit_interval(1.0, 0.5) == doctest::Approx(1.0 / std::cosh(0.5)));
}

TEST_CASE("Newton solution of the binary equation has a small residual") {
  const Grid1D g;
  const OffspringLaw law = OffspringLaw::from_weights({{2, 1.0}});
  const KillingRate c = KillingRate::constant_on_D(1.0);
  const NewtonResult nr = newton_bvp_1d(0.2, 0.8, c, law, g);
  CHECK(nr.residual < 1e-6);
  CHECK(residual_check(nr.u, c, law, g) < 1e-6);
  for (double v : nr.u) {
    CHECK(v >= 0.0);
    CHECK(v <= 0.8 + 1e-12);
  }
}

TEST_CASE("Picard reproduces the killed heat semigroup") {
  // w_t = w_xx - c w with w(0) = sin(pi x): exp(-(pi^2 + c) t) sin(pi x).
  Grid1D g;
  g.dt = 5e-4;
  const GridFunction f = sample_on_grid(g, [](double x) { return std::sin(kPi * x); });
  const double t = 0.1, c1 = 0.5;
  const PicardResult pr = picard_duhamel_1d(f, t, OffspringLaw::from_weights({}), KillingRate::constant_on_D(c1), g);
  for (std::size_t i = 0; i < g.size(); i += 10) {
    CHECK(std::abs(pr.w[i] - std::exp(-(kPi * kPi + c1) * t) * std::sin(kPi * g.node(i))) < 1e-4);
  }
}

TEST_CASE("Picard at a large time matches Newton") {
  const Grid1D g;
  const OffspringLaw law = OffspringLaw::from_weights({{2, 1.0}});
  const KillingRate c = KillingRate::constant_on_D(1.0);
  const GridFunction f = sample_on_grid(g, [](double x) { return x == 0.0 ? 0.2 : (x == 1.0 ? 0.8 : 0.0); });
  const PicardResult pr = picard_duhamel_1d(f, 8.0, law, c, g);
  const NewtonResult nr = newton_bvp_1d(0.2, 0.8, c, law, g);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(pr.w[i] - nr.u[i]));
  CHECK(worst < 1e-6);
  CHECK(interpolate(g, nr.u, 0.5) == doctest::Approx(nr.u[100]));
}

TEST_CASE("Poisson integral reproduces the arc harmonic measure") {
  const Domain disk = Domain::ball(Point{0.0, 0.0}, 1.0);
  const BoundaryData phi = BoundaryData::arc_indicator(0.0, kPi);
  CHECK(poisson_disk(disk, phi, Point{0.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-9));
  for (const Point& x : {Point{0.5, 0.5}, Point{0.0, -0.5}, Point{0.9, 0.05}, Point{-0.3, 0.95}}) {
    CHECK(std::abs(poisson_disk(disk, phi, x) - arc_measure(0.0, kPi, x[0], x[1])) < 1e-8);
  }
  CHECK(poisson_disk(disk, BoundaryData::constant(0.7), Point{0.2, 0.6}) == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("Poisson integral on a shifted disk") {
  const Domain disk = Domain::ball(Point{1.0, -2.0}, 2.0);
  const BoundaryData phi = BoundaryData::arc_indicator(kPi / 2.0, kPi);
  const Point x{1.5, -1.0};
  CHECK(std::abs(poisson_disk(disk, phi, x) - arc_measure(kPi / 2.0, kPi, 0.25, 0.5)) < 1e-8);
}

TEST_CASE("exact flow exit kernel") {
  const Domain dom = Domain::interval(0.0, 1.0);
  const Flow f = Flow::translation(Point{1.0});
  auto g = [](const Point&) { return 0.5; };
  CHECK(exit_kernel_flow_exact(f, dom, 1.0, g, Point{0.3}, 10.0) == doctest::Approx(0.5 * std::exp(-0.7)));
  CHECK(exit_kernel_flow_exact(f, dom, 1.0, g, Point{1.0}, 10.0) == 0.5);
}
