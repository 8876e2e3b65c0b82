#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nlbranch/domain.hpp"
#include "nlbranch/killing.hpp"
#include "nlbranch/rng.hpp"

namespace nlbranch {

/// Brownian motion with generator Laplacian: each coordinate increment over
/// a step dt is N(0, 2 dt).
struct BrownianMotion {
  double h = 1.0e-4;
};

/// A deterministic flow phi_t on R^d (unstopped). Stopping at dD is done by
/// the free functions below.
class Flow {
 public:
  struct Translation {
    Point direction;
  };
  /// Cartesian product; factor i acts on the next factors[i].dim() coordinates.
  struct Product {
    std::vector<Flow> factors;
  };
  /// Flow of x' = B(x), integrated by classical RK4 with fixed step h.
  struct VectorField {
    std::function<Point(const Point&)> field;
    std::size_t dim;
    double h;
    std::string label;
  };
  using Variant = std::variant<Translation, Product, VectorField>;

  static Flow translation(const Point& direction);
  static Flow product(std::vector<Flow> factors);
  static Flow vector_field(std::function<Point(const Point&)> field, std::size_t dim, double h,
                           std::string label = "field");

  std::size_t dim() const { return dim_; }
  const Variant& variant() const { return v_; }

  /// phi_t(x), t >= 0.
  Point advance(const Point& x, double t) const;

  /// Direction if this flow is a translation (or a product of translations).
  std::optional<Point> translation_direction() const;

  /// Step used to scan for the boundary when no closed form exists.
  double scan_step() const;

  std::string describe() const;

 private:
  explicit Flow(Variant v, std::size_t dim) : v_(std::move(v)), dim_(dim) {}
  void advance_into(const Point& x, double t, Point& out, std::size_t offset) const;

  Variant v_;
  std::size_t dim_ = 0;
};

/// Result of running a motion from x to its first entry into dD.
struct ExitRecord {
  double exit_time = 0.0;
  Point exit_point;
  double path_integral_c = 0.0;  // integral of c along the path up to exit_time
  bool truncated = false;        // time cap reached before exit
};

/// First entry time of dD by the flow started at x in E, with exit point
/// phi_tau(x). Closed form for translations; otherwise scan with the flow's
/// step and bisect to 1e-12 * cap_M. Throws UnboundedEntryTimeError if the
/// flow has not reached dD by time cap_M.
ExitRecord flow_entry_time(const Flow& flow, const Domain& dom, const Point& x, double cap_M);

/// The stopped flow Phi_t(x) = phi_{min(t, tau(x))}(x); always in E.
Point flow_step(const Flow& flow, const Domain& dom, const Point& x, double t, double cap_M);

/// flow_entry_time plus the killing integral along the path (exact for a
/// constant rate, left-endpoint rule with step h otherwise).
ExitRecord flow_path_to_exit(const Flow& flow, const Domain& dom, const KillingRate& c,
                             const Point& x, double cap_M, double h);

/// sup of tau over D when it has a closed form (translations on any
/// supported shape); nullopt otherwise.
std::optional<double> entry_time_bound(const Flow& flow, const Domain& dom);

/// Brownian path from x until it enters dD, accumulating the killing
/// integral by the left-endpoint rule. Hitting caps.time_cap yields a
/// truncated record rather than an error.
ExitRecord brownian_path_to_exit(const BrownianMotion& bm, const Domain& dom, const KillingRate& c,
                                 const Point& x, RandomStream& rng, const Caps& caps);

struct BrownianStep {
  Point next;
  bool exited = false;
};

/// One step of size dt from x in D. A step that leaves D exits at the
/// projection of its endpoint. A step that stays inside still exits with the
/// Brownian-bridge crossing probability exp(-d1 d2 / dt), with d1, d2 the
/// boundary distances of its endpoints (nearest face as half-space surrogate).
inline BrownianStep brownian_step(const Domain& dom, const Point& x, double dt, RandomStream& rng) {
  const double scale = std::sqrt(2.0 * dt);
  Point y = x;
  for (std::size_t i = 0; i < y.dim(); ++i) y[i] += scale * rng.normal();
  if (!dom.contains(y)) {
    return {dom.on_boundary(y) ? y : dom.project_to_boundary(y), true};
  }
  const double d1 = dom.interior_distance(x);
  const double d2 = dom.interior_distance(y);
  const double a = d1 * d2 / dt;
  if (a < 40.0 && rng.uniform() < std::exp(-a)) {
    return {dom.project_to_boundary(d1 < d2 ? x : y), true};
  }
  return {y, false};
}

}  // namespace nlbranch
