#include "nlbranch/boundary_data.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nlbranch/errors.hpp"

namespace nlbranch {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be finite and >= 0");
  }
}

}  // namespace

double polar_angle(const Domain& disk, const Point& y) {
  return wrap_angle(std::atan2(y[1] - disk.center()[1], y[0] - disk.center()[0]));
}

BoundaryData BoundaryData::constant(double value) {
  require_nonnegative(value, "constant boundary value");
  return BoundaryData(Constant{value}, value);
}

BoundaryData BoundaryData::interval_endpoints(double at_lo, double at_hi) {
  require_nonnegative(at_lo, "endpoint value");
  require_nonnegative(at_hi, "endpoint value");
  return BoundaryData(IntervalEndpoints{at_lo, at_hi}, std::max(at_lo, at_hi));
}

BoundaryData BoundaryData::arc_indicator(double theta_begin, double theta_end) {
  if (!(theta_end > theta_begin) || theta_end - theta_begin >= kTwoPi) {
    throw std::invalid_argument("arc requires theta_begin < theta_end < theta_begin + 2pi");
  }
  return BoundaryData(ArcIndicator{theta_begin, theta_end}, 1.0);
}

BoundaryData BoundaryData::tabulated(std::vector<std::pair<Point, double>> samples) {
  if (samples.empty()) throw std::invalid_argument("tabulated boundary data needs samples");
  double sup = 0.0;
  for (const auto& [p, v] : samples) {
    require_nonnegative(v, "tabulated boundary value");
    sup = std::max(sup, v);
  }
  return BoundaryData(Tabulated{std::move(samples)}, sup);
}

BoundaryData BoundaryData::custom(std::function<double(const Point&)> fn, double sup_bound,
                                  std::vector<Point> jumps, std::string label) {
  require_nonnegative(sup_bound, "sup bound");
  BoundaryData b(Custom{std::move(fn), std::move(label)}, sup_bound);
  b.declared_jumps_ = std::move(jumps);
  return b;
}

BoundaryData BoundaryData::with_sup_bound(double sup_bound) const {
  require_nonnegative(sup_bound, "sup bound");
  double known = 0.0;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Constant>) known = v.value;
        if constexpr (std::is_same_v<T, IntervalEndpoints>) known = std::max(v.at_lo, v.at_hi);
        if constexpr (std::is_same_v<T, ArcIndicator>) known = 1.0;
        if constexpr (std::is_same_v<T, Tabulated>) {
          for (const auto& s : v.samples) known = std::max(known, s.second);
        }
      },
      v_);
  if (sup_bound < known) {
    throw std::invalid_argument("sup bound below the largest boundary value");
  }
  BoundaryData b = *this;
  b.sup_bound_ = sup_bound;
  return b;
}

BoundaryData BoundaryData::with_jumps(std::vector<Point> jumps) const {
  BoundaryData b = *this;
  b.declared_jumps_ = std::move(jumps);
  return b;
}

double BoundaryData::boundary_value(const Domain& dom, const Point& y) const {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return v.value;
        } else if constexpr (std::is_same_v<T, IntervalEndpoints>) {
          // Nearer endpoint of the first axis.
          return (y[0] - dom.lo()[0] <= dom.hi()[0] - y[0]) ? v.at_lo : v.at_hi;
        } else if constexpr (std::is_same_v<T, ArcIndicator>) {
          const double theta = polar_angle(dom, y);
          const double rel = wrap_angle(theta - v.theta_begin);
          return rel <= v.theta_end - v.theta_begin ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, Tabulated>) {
          const auto* best = &v.samples.front();
          double best_d = distance(best->first, y);
          for (const auto& s : v.samples) {
            const double d = distance(s.first, y);
            if (d < best_d) {
              best_d = d;
              best = &s;
            }
          }
          return best->second;
        } else {
          return v.fn(y);
        }
      },
      v_);
}

double BoundaryData::eval_on_E(const Domain& dom, const Point& x) const {
  if (dom.contains(x)) return 0.0;
  if (!dom.on_boundary(x)) throw OutsideClosureError("point " + x.to_string() + " lies outside E");
  const double value = boundary_value(dom, x);
  if (!(value >= 0.0) || value > sup_bound_) {
    throw std::domain_error("boundary value " + std::to_string(value) + " at " + x.to_string() +
                            " violates 0 <= phi <= sup_bound");
  }
  return value;
}

std::vector<Point> BoundaryData::jump_set(const Domain& dom) const {
  std::vector<Point> jumps = declared_jumps_;
  if (const auto* arc = std::get_if<ArcIndicator>(&v_)) {
    if (dom.kind() != DomainKind::Ball || dom.dim() != 2) {
      throw std::invalid_argument("arc indicator requires a disk in R^2");
    }
    for (double theta : {arc->theta_begin, arc->theta_end}) {
      jumps.push_back(dom.center() +
                      dom.radius() * Point{std::cos(theta), std::sin(theta)});
    }
  }
  return jumps;
}

std::string BoundaryData::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Constant>) os << "Constant(" << v.value << ")";
        if constexpr (std::is_same_v<T, IntervalEndpoints>)
          os << "IntervalEndpoints(" << v.at_lo << ", " << v.at_hi << ")";
        if constexpr (std::is_same_v<T, ArcIndicator>)
          os << "ArcIndicator(" << v.theta_begin << ", " << v.theta_end << ")";
        if constexpr (std::is_same_v<T, Tabulated>) os << "Tabulated(" << v.samples.size() << ")";
        if constexpr (std::is_same_v<T, Custom>) os << "Custom(" << v.label << ")";
      },
      v_);
  return os.str();
}

}  // namespace nlbranch
