#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlbranch/boundary_data.hpp"
#include "nlbranch/domain.hpp"
#include "nlbranch/motion.hpp"

namespace nlbranch {

/// A nonnegative map g on dD, finite except at `singular` points.
struct BoundaryMap {
  std::function<double(const Point&)> fn;
  std::vector<Point> singular;
  /// g ~ dist^(-exponent) near each singular point.
  double exponent = 0.0;
  std::string label;
};

/// g(y) = dist(y, points)^(-p); g = 0 when `points` is empty.
BoundaryMap distance_power(std::vector<Point> points, double p);
BoundaryMap constant_map(double value);

/// k = H_D g together with the declared set of boundary points where k
/// blows up.
struct ControlFunction {
  BoundaryMap g;
  std::function<double(const Point&)> k;
  std::vector<Point> blow_up_set;
  std::string label;

  double operator()(const Point& x) const { return k(x); }
};

/// Flow case: k = g(phi_tau(x)(x)).
struct FlowCase {
  const Flow* flow;
  double cap_M;
};

/// Builds k = H_D g. Brownian case: linear interpolation on an interval,
/// Poisson quadrature (tolerance 1e-5) on a 2D disk. Flow case: g at the
/// exit point. Throws ValidationError("unsupported_control") for other
/// geometries and for controls whose Poisson integral diverges (p >= 1 on
/// the disk, infinite g at an interval endpoint).
ControlFunction build_control(const BoundaryMap& g, const Domain& dom,
                              std::optional<FlowCase> flow = std::nullopt);

enum class ApproachStyle { Radial, TangentiallySkewed, Custom };

struct ApproachSequence {
  Point target;
  std::vector<Point> points;
  ApproachStyle style = ApproachStyle::Custom;
};

/// n points along the inward normal at y, at boundary distances
/// geometrically spaced from d_max down to d_min.
ApproachSequence radial_sequence(const Domain& dom, const Point& y, std::size_t n, double d_max, double d_min);

/// Disk only: radius R - d and angular offset sqrt(d) * skew from y, so the
/// approach is tangential to first order.
ApproachSequence skewed_sequence(const Domain& disk, const Point& y, std::size_t n, double d_max, double d_min,
                                 double skew = 1.0);

/// Checks that all points lie in D and that |x_n - y| strictly decreases.
ApproachSequence custom_sequence(const Domain& dom, const Point& y, std::vector<Point> points);

struct Evaluation {
  double value = 0.0;
  double std_error = 0.0;
};

using Evaluator = std::function<Evaluation(const Point&)>;

/// tol(x_n) = max(se_multiplier * stderr(x_n), floor).
struct Tolerance {
  double floor = 1e-6;
  double se_multiplier = 0.0;

  static Tolerance oracle() { return {1e-6, 0.0}; }
  static Tolerance monte_carlo() { return {1e-3, 3.0}; }
  double at(const Evaluation& e) const { return std::max(se_multiplier * e.std_error, floor); }
};

struct ControlOptions {
  double k_cap = 1e6;
  std::size_t tail = 4;
  /// Minimal log-log slope for "k increases without bound" and for
  /// "u / (1 + k) decays to 0" on the tail.
  double slope_min = 0.1;
  Tolerance tol = Tolerance::oracle();
};

enum class VerdictKind { PassStar, PassStarStar, Fail };

std::string to_string(VerdictKind v);

struct Verdict {
  VerdictKind kind = VerdictKind::Fail;
  bool k_divergent = false;
  /// Index of the first tail point violating the criterion, when failing.
  std::optional<std::size_t> offending;
  double target_value = 0.0;
  double last_value = 0.0;
  double extrapolated = 0.0;  // first-order limit of u along the sequence
  double last_k = 0.0;
  double last_ratio = 0.0;    // |u| / (1 + k) at the last point
  double k_slope = 0.0;       // -d log k / d log dist on the tail
  double ratio_slope = 0.0;   // d log ratio / d log dist on the tail
  std::vector<double> dist, u, k, tol;
  std::string detail;
};

/// Classifies each sequence: if k stays bounded, PASS-(*) iff u(x_n) ->
/// phi(y) within tolerance; if k increases without bound (k > k_cap, or an
/// increasing tail with log-log slope >= slope_min), PASS-(**) iff
/// |u| / (1 + k) -> 0 within tolerance. Throws if a point leaves D_o.
std::vector<Verdict> check_controlled(const Evaluator& u, const Domain& dom, const BoundaryData& phi,
                                      const ControlFunction& k, const std::vector<ApproachSequence>& seqs,
                                      const ControlOptions& opt = {});

struct PointwiseVerdict {
  bool passed = true;
  std::vector<Verdict> sequences;
};

/// PASS iff u(x_n) -> phi(y) within tolerance along every sequence; phi
/// must be continuous on dD.
PointwiseVerdict check_pointwise_boundary(const Evaluator& u, const Domain& dom, const BoundaryData& phi,
                                          const std::vector<ApproachSequence>& seqs,
                                          const ControlOptions& opt = {});

}  // namespace nlbranch
