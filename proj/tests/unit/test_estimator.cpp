#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "nlbranch/errors.hpp"
#include "nlbranch/estimator.hpp"
#include "nlbranch/oracle.hpp"

using namespace nlbranch;

namespace {

Model brownian_model(double c1, OffspringLaw law, double h = 1e-3) {
  Caps caps;
  caps.h = h;
  return Model{Domain::interval(0.0, 1.0), BrownianMotion{h}, KillingRate::constant_on_D(c1), std::move(law),
               PlacementKernel::local(), caps};
}

Model flow_model(double c1, PlacementKernel kernel = PlacementKernel::local()) {
  return Model{Domain::interval(0.0, 1.0), Flow::translation(Point{1.0}), KillingRate::constant_on_D(c1),
               OffspringLaw::from_weights({{2, 1.0}}), std::move(kernel), Caps{}};
}

std::string reason_of(auto&& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.reason();
  }
  return "";
}

}  // namespace

TEST_CASE("H_0 f is f") {
  const Model m = brownian_model(1.0, OffspringLaw::from_weights({{2, 1.0}}));
  auto f = [](const Point& x) { return 0.25 + x[0] / 2.0; };
  const EstimatorResult r = estimate_Ht(m, Point{0.3}, f, 0.0, 100, RunOptions{});
  CHECK(r.mean == doctest::Approx(0.4));
  CHECK(r.std_error == 0.0);
}

TEST_CASE("constant boundary data at r is a fixed point") {
  const Model m = brownian_model(1.0, OffspringLaw::from_weights({{2, 1.0}}));
  const SolveReport rep = estimate_u(m, Point{0.5}, BoundaryData::constant(1.0), 1.0, 500, RunOptions{});
  CHECK(rep.result.mean == 1.0);
  CHECK(rep.result.std_error == 0.0);
  CHECK(rep.result.truncated_fraction < 0.01);
}

TEST_CASE("estimates do not depend on the thread count") {
  const Model m = brownian_model(1.0, OffspringLaw::from_weights({{2, 1.0}}));
  const BoundaryData phi = BoundaryData::interval_endpoints(0.2, 0.8);
  RunOptions one{7, 1, 0}, three{7, 3, 0};
  const SolveReport a = estimate_u(m, Point{0.4}, phi, 1.0, 2000, one);
  const SolveReport b = estimate_u(m, Point{0.4}, phi, 1.0, 2000, three);
  CHECK(a.result.mean == b.result.mean);
  CHECK(a.result.std_error == b.result.std_error);
}

TEST_CASE("linear case matches the harmonic extension") {
  const Model m = brownian_model(0.0, OffspringLaw::from_weights({{2, 1.0}}));
  const SolveReport rep =
      estimate_u(m, Point{0.3}, BoundaryData::interval_endpoints(0.0, 1.0), 1.0, 20000, RunOptions{3, 1, 0});
  CHECK(std::abs(rep.result.mean - 0.3) <= 3.0 * rep.result.std_error);
}

TEST_CASE("solve validation reasons") {
  const Model m = brownian_model(1.0, OffspringLaw::from_weights({{2, 1.0}}));
  CHECK(reason_of([&] { estimate_u(m, Point{0.5}, BoundaryData::constant(0.5), 2.0, 10, RunOptions{}); }) ==
        "offspring_condition_violated");
  CHECK(reason_of([&] { estimate_u(m, Point{0.5}, BoundaryData::constant(1.2), 1.0, 10, RunOptions{}); }) ==
        "boundary_data_exceeds_r");
  // Flows need sup phi < r strictly and 0 < c1 <= m1 / (m1 - 1) = 2.
  CHECK(reason_of([&] { estimate_u(flow_model(1.0), Point{0.5}, BoundaryData::constant(1.0), 1.0, 10, RunOptions{}); }) ==
        "boundary_data_exceeds_r");
  CHECK(reason_of([&] { estimate_u(flow_model(2.5), Point{0.5}, BoundaryData::constant(0.5), 1.0, 10, RunOptions{}); }) ==
        "flow_rate_out_of_range");
}

TEST_CASE("guard refuses a heavily killed Brownian solve") {
  const Model m = brownian_model(400.0, OffspringLaw::from_weights({{1, 0.5}}), 1e-4);
  GuardOptions g;
  g.pilot_n = 500;
  CHECK(reason_of([&] { estimate_u(m, Point{0.5}, BoundaryData::constant(0.5), 1.0, 10, RunOptions{}, g); }) ==
        "nagasawa_guard_failed");
}

TEST_CASE("flow guard is exp(-M c1)") {
  const Model m = flow_model(0.5);
  const GuardReport g = nagasawa_guard(m, {Point{0.2}}, GuardOptions{}, RunOptions{});
  CHECK(g.exact);
  CHECK(g.epsilon == std::exp(-0.5));
  CHECK(g.std_error == 0.0);
}

TEST_CASE("brownian pilot against the closed form") {
  const Model m = brownian_model(1.0, OffspringLaw::from_weights({}), 1e-4);
  const EstimatorResult r = exp_exit_pilot(m, Point{0.3}, 20000, RunOptions{4, 1, 0});
  CHECK(std::abs(r.mean - expected_exp_exit_interval(1.0, 0.3)) <= 3.0 * r.std_error + 1e-3);
}

TEST_CASE("flow exit kernel is deterministic") {
  const Model m = flow_model(1.0);
  auto f = [](const Point&) { return 1.0; };
  const EstimatorResult r = exit_kernel_mc(m, Point{0.25}, f, 100, RunOptions{});
  CHECK(r.mean == std::exp(-0.75));
  CHECK(r.std_error == 0.0);
}

TEST_CASE("flow pure representation refuses a non-commuting kernel") {
  const Model m = flow_model(0.5, PlacementKernel::gaussian_jitter(0.1));
  CHECK(reason_of([&] {
          estimate_u_flow_pure(m, Point{0.5}, BoundaryData::interval_endpoints(0.0, 0.5), 1.0, 10,
                               ClockMode::FlowModulated, RunOptions{});
        }) == "commutation_violated");
}

TEST_CASE("flow pure representation reproduces the direct estimate") {
  const Model m = flow_model(0.5);
  const BoundaryData phi = BoundaryData::interval_endpoints(0.0, 0.5);
  const SolveReport direct = estimate_u(m, Point{0.4}, phi, 1.0, 5000, RunOptions{5, 1, 0});
  const SolveReport pure =
      estimate_u_flow_pure(m, Point{0.4}, phi, 1.0, 5000, ClockMode::FlowModulated, RunOptions{5, 1, 0});
  CHECK(std::abs(direct.result.mean - pure.result.mean) <=
        3.0 * std::hypot(direct.result.std_error, pure.result.std_error) + 1e-12);
  CHECK(flow_entry_bound(m) == doctest::Approx(1.0));
}
