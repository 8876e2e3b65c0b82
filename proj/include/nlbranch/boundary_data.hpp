#pragma once

#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nlbranch/domain.hpp"

namespace nlbranch {

/// Nonnegative bounded boundary data on dD, extended by zero to D.
///
/// Discontinuities are never inferred: the jump set is whatever the
/// constructor declares (the two arc endpoints for ArcIndicator).
class BoundaryData {
 public:
  struct Constant {
    double value;
  };
  struct IntervalEndpoints {
    double at_lo, at_hi;
  };
  /// Indicator of the closed arc of angles [theta_begin, theta_end] (radians,
  /// counter-clockwise, measured from the centre of a disk).
  struct ArcIndicator {
    double theta_begin, theta_end;
  };
  struct Tabulated {
    std::vector<std::pair<Point, double>> samples;
  };
  struct Custom {
    std::function<double(const Point&)> fn;
    std::string label;
  };
  using Variant = std::variant<Constant, IntervalEndpoints, ArcIndicator, Tabulated, Custom>;

  static BoundaryData constant(double value);
  static BoundaryData interval_endpoints(double at_lo, double at_hi);
  static BoundaryData arc_indicator(double theta_begin, double theta_end);
  static BoundaryData tabulated(std::vector<std::pair<Point, double>> samples);
  /// Arbitrary boundary function; `sup_bound` must dominate it.
  static BoundaryData custom(std::function<double(const Point&)> fn, double sup_bound,
                             std::vector<Point> jumps = {}, std::string label = "custom");

  /// Replaces the sup bound; throws if it would fall below a known value.
  BoundaryData with_sup_bound(double sup_bound) const;
  BoundaryData with_jumps(std::vector<Point> jumps) const;

  double sup_bound() const { return sup_bound_; }
  const Variant& variant() const { return v_; }

  /// phi(x) for x on dD, 0 for x in D; throws for x outside E.
  double eval_on_E(const Domain& dom, const Point& x) const;

  /// phi(y) for a point already known to lie on dD (hot path, no checks).
  double boundary_value(const Domain& dom, const Point& y) const;

  /// Declared discontinuity points on dD.
  std::vector<Point> jump_set(const Domain& dom) const;

  std::string describe() const;

 private:
  explicit BoundaryData(Variant v, double sup) : v_(std::move(v)), sup_bound_(sup) {}

  Variant v_;
  double sup_bound_ = 0.0;
  std::vector<Point> declared_jumps_;
};

/// Angle of y around the disk centre, normalised to [0, 2pi).
double polar_angle(const Domain& disk, const Point& y);

}  // namespace nlbranch
