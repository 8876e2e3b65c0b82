#pragma once

#include <string>

#include "nlbranch/point.hpp"

namespace nlbranch {

enum class DomainKind { Interval, Box, Ball };

/// A bounded open set D of R^d together with its closure E and boundary.
///
/// Intervals and axis-aligned boxes use exact predicates: a point is on the
/// boundary iff some coordinate equals a face value. Balls test |x - c| = R
/// up to `boundary_tolerance` (or a few ulps of R when the tolerance is 0),
/// since projected points cannot satisfy the equality exactly.
///
/// Immutable after construction.
class Domain {
 public:
  static Domain interval(double a, double b);
  static Domain box(const Point& lo, const Point& hi);
  static Domain ball(const Point& center, double radius);

  DomainKind kind() const { return kind_; }
  std::size_t dim() const { return lo_.dim(); }

  /// Interval/box corners; for balls the bounding box.
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  const Point& center() const { return center_; }
  double radius() const { return radius_; }

  double boundary_tolerance() const { return tol_; }
  Domain with_boundary_tolerance(double tol) const;

  bool contains(const Point& x) const;
  bool on_boundary(const Point& x) const;
  bool in_closure(const Point& x) const { return contains(x) || on_boundary(x); }

  /// Euclidean distance to the boundary; requires x in E.
  double boundary_distance(const Point& x) const;

  /// Nearest boundary point. Ties go to the lowest coordinate index (and the
  /// lower face); the centre of a ball projects along the first axis.
  Point project_to_boundary(const Point& x) const;

  double diameter() const;

  /// Boundary distance without the closure check, used on hot paths where
  /// the caller already knows x is in D.
  double interior_distance(const Point& x) const;

  std::string describe() const;

 private:
  Domain() = default;
  void check_dim(const Point& x) const;
  double ball_slack() const;

  DomainKind kind_ = DomainKind::Interval;
  Point lo_, hi_, center_;
  double radius_ = 0.0;
  double tol_ = 0.0;
};

}  // namespace nlbranch
