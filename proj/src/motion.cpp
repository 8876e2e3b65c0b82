#include "nlbranch/motion.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nlbranch/errors.hpp"

namespace nlbranch {
namespace {

Point rk4_step(const std::function<Point(const Point&)>& field, const Point& x, double dt) {
  const Point k1 = field(x);
  const Point k2 = field(x + (0.5 * dt) * k1);
  const Point k3 = field(x + (0.5 * dt) * k2);
  const Point k4 = field(x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Entry time of the ray x + t v into the boundary, for x in D.
double translation_entry_time(const Domain& dom, const Point& x, const Point& v) {
  double tau = std::numeric_limits<double>::infinity();
  if (dom.kind() == DomainKind::Ball) {
    const Point w = x - dom.center();
    const double a = dot(v, v);
    if (a == 0.0) return tau;
    const double b = dot(w, v);
    const double cc = dot(w, w) - dom.radius() * dom.radius();
    const double disc = std::max(0.0, b * b - a * cc);
    // cc < 0 in D, so the larger root is positive; use the stable form.
    return b >= 0.0 ? -cc / (b + std::sqrt(disc)) : (std::sqrt(disc) - b) / a;
  }
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (v[i] > 0.0) tau = std::min(tau, (dom.hi()[i] - x[i]) / v[i]);
    if (v[i] < 0.0) tau = std::min(tau, (dom.lo()[i] - x[i]) / v[i]);
  }
  return tau;
}

}  // namespace

Flow Flow::translation(const Point& direction) {
  if (!direction.is_finite()) throw std::invalid_argument("translation direction must be finite");
  return Flow(Translation{direction}, direction.dim());
}

Flow Flow::product(std::vector<Flow> factors) {
  if (factors.empty()) throw std::invalid_argument("product flow needs at least one factor");
  std::size_t d = 0;
  for (const auto& f : factors) d += f.dim();
  if (d > kMaxDim) throw DimensionError("product flow dimension exceeds kMaxDim");
  return Flow(Product{std::move(factors)}, d);
}

Flow Flow::vector_field(std::function<Point(const Point&)> field, std::size_t dim, double h,
                        std::string label) {
  if (!(h > 0.0)) throw std::invalid_argument("vector field integrator step must be > 0");
  if (dim == 0 || dim > kMaxDim) throw DimensionError("vector field dimension out of range");
  return Flow(VectorField{std::move(field), dim, h, std::move(label)}, dim);
}

void Flow::advance_into(const Point& x, double t, Point& out, std::size_t offset) const {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Translation>) {
          for (std::size_t i = 0; i < dim_; ++i) out[offset + i] = x[offset + i] + t * v.direction[i];
        } else if constexpr (std::is_same_v<T, Product>) {
          std::size_t o = offset;
          for (const auto& f : v.factors) {
            f.advance_into(x, t, out, o);
            o += f.dim();
          }
        } else {
          Point y(dim_);
          for (std::size_t i = 0; i < dim_; ++i) y[i] = x[offset + i];
          // Count full steps robustly so advance(x, n*h) is exactly n RK4 steps.
          const double ratio = t / v.h;
          auto n = static_cast<long long>(std::floor(ratio + 1e-9));
          double rest = t - static_cast<double>(n) * v.h;
          if (rest < 0.0) rest = 0.0;
          for (long long s = 0; s < n; ++s) y = rk4_step(v.field, y, v.h);
          if (rest > 0.0) y = rk4_step(v.field, y, rest);
          for (std::size_t i = 0; i < dim_; ++i) out[offset + i] = y[i];
        }
      },
      v_);
}

Point Flow::advance(const Point& x, double t) const {
  if (x.dim() != dim_) throw DimensionError("flow and point dimensions differ");
  if (t == 0.0) return x;
  Point out = x;
  advance_into(x, t, out, 0);
  return out;
}

std::optional<Point> Flow::translation_direction() const {
  if (const auto* tr = std::get_if<Translation>(&v_)) return tr->direction;
  if (const auto* pr = std::get_if<Product>(&v_)) {
    Point dir(dim_);
    std::size_t o = 0;
    for (const auto& f : pr->factors) {
      auto sub = f.translation_direction();
      if (!sub) return std::nullopt;
      for (std::size_t i = 0; i < f.dim(); ++i) dir[o + i] = (*sub)[i];
      o += f.dim();
    }
    return dir;
  }
  return std::nullopt;
}

double Flow::scan_step() const {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, VectorField>) {
          return v.h;
        } else if constexpr (std::is_same_v<T, Product>) {
          double h = std::numeric_limits<double>::infinity();
          for (const auto& f : v.factors) h = std::min(h, f.scan_step());
          return h;
        } else {
          return std::numeric_limits<double>::infinity();
        }
      },
      v_);
}

std::string Flow::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Translation>) os << "Translation" << v.direction.to_string();
        if constexpr (std::is_same_v<T, Product>) {
          os << "Product(";
          for (std::size_t i = 0; i < v.factors.size(); ++i) {
            if (i) os << ", ";
            os << v.factors[i].describe();
          }
          os << ")";
        }
        if constexpr (std::is_same_v<T, VectorField>) os << "VectorField(" << v.label << ", h=" << v.h << ")";
      },
      v_);
  return os.str();
}

ExitRecord flow_entry_time(const Flow& flow, const Domain& dom, const Point& x, double cap_M) {
  if (flow.dim() != dom.dim()) throw DimensionError("flow and domain dimensions differ");
  ExitRecord rec;
  if (dom.on_boundary(x)) {
    rec.exit_point = x;
    return rec;
  }
  if (!dom.contains(x)) throw OutsideClosureError("flow start " + x.to_string() + " lies outside E");

  if (auto dir = flow.translation_direction()) {
    const double tau = translation_entry_time(dom, x, *dir);
    if (!(tau <= cap_M)) {
      throw UnboundedEntryTimeError("flow from " + x.to_string() +
                                    " does not reach the boundary within cap M = " +
                                    std::to_string(cap_M));
    }
    rec.exit_time = tau;
    rec.exit_point = dom.project_to_boundary(flow.advance(x, tau));
    return rec;
  }

  const double h = flow.scan_step();
  Point y = x;
  double t = 0.0;
  for (;;) {
    if (t > cap_M) {
      throw UnboundedEntryTimeError("flow from " + x.to_string() +
                                    " does not reach the boundary within cap M = " +
                                    std::to_string(cap_M));
    }
    const Point next = flow.advance(y, h);
    if (dom.contains(next)) {
      y = next;
      t += h;
      continue;
    }
    // First step that reaches dD: bisect its length.
    double lo = 0.0, hi = h;
    const double tol = 1e-12 * std::max(cap_M, h);
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (dom.contains(flow.advance(y, mid))) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    rec.exit_time = t + hi;
    const Point p = flow.advance(y, hi);
    rec.exit_point = dom.on_boundary(p) ? p : dom.project_to_boundary(p);
    if (rec.exit_time > cap_M) {
      throw UnboundedEntryTimeError("flow entry time exceeds cap M = " + std::to_string(cap_M));
    }
    return rec;
  }
}

Point flow_step(const Flow& flow, const Domain& dom, const Point& x, double t, double cap_M) {
  if (t == 0.0 || dom.on_boundary(x)) return x;
  const ExitRecord rec = flow_entry_time(flow, dom, x, cap_M);
  if (t >= rec.exit_time) return rec.exit_point;
  return flow.advance(x, t);
}

ExitRecord flow_path_to_exit(const Flow& flow, const Domain& dom, const KillingRate& c,
                             const Point& x, double cap_M, double h) {
  ExitRecord rec = flow_entry_time(flow, dom, x, cap_M);
  if (rec.exit_time == 0.0) return rec;
  if (c.is_constant()) {
    rec.path_integral_c = c.c_max() * rec.exit_time;
    return rec;
  }
  double s = 0.0, acc = 0.0;
  Point y = x;
  while (s < rec.exit_time) {
    const double dt = std::min(h, rec.exit_time - s);
    acc += c.in_D(y) * dt;
    y = flow.advance(y, dt);
    s += dt;
  }
  rec.path_integral_c = acc;
  return rec;
}

std::optional<double> entry_time_bound(const Flow& flow, const Domain& dom) {
  const auto dir = flow.translation_direction();
  if (!dir) return std::nullopt;
  if (dom.kind() == DomainKind::Ball) {
    const double speed = norm(*dir);
    if (speed == 0.0) return std::nullopt;
    return dom.diameter() / speed;
  }
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dir->dim(); ++i) {
    if ((*dir)[i] != 0.0) bound = std::min(bound, (dom.hi()[i] - dom.lo()[i]) / std::abs((*dir)[i]));
  }
  if (!std::isfinite(bound)) return std::nullopt;
  return bound;
}

ExitRecord brownian_path_to_exit(const BrownianMotion& bm, const Domain& dom, const KillingRate& c,
                                 const Point& x, RandomStream& rng, const Caps& caps) {
  ExitRecord rec;
  if (dom.on_boundary(x)) {
    rec.exit_point = x;
    return rec;
  }
  if (!dom.contains(x)) throw OutsideClosureError("start " + x.to_string() + " lies outside E");
  Point y = x;
  double t = 0.0, acc = 0.0;
  while (t < caps.time_cap) {
    const double dt = std::min(bm.h, caps.time_cap - t);
    acc += c.in_D(y) * dt;
    const BrownianStep step = brownian_step(dom, y, dt, rng);
    t += dt;
    y = step.next;
    if (step.exited) {
      rec.exit_time = t;
      rec.exit_point = y;
      rec.path_integral_c = acc;
      return rec;
    }
  }
  rec.exit_time = t;
  rec.exit_point = y;
  rec.path_integral_c = acc;
  rec.truncated = true;
  return rec;
}

}  // namespace nlbranch
