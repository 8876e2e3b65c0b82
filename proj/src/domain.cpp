#include "nlbranch/domain.hpp"

#include <limits>
#include <sstream>

#include "nlbranch/errors.hpp"

namespace nlbranch {

std::string Point::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < dim(); ++i) {
    if (i) os << ", ";
    os << (*this)[i];
  }
  os << ')';
  return os.str();
}

Domain Domain::interval(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("interval requires finite a < b");
  }
  Domain d;
  d.kind_ = DomainKind::Interval;
  d.lo_ = Point{a};
  d.hi_ = Point{b};
  d.center_ = Point{0.5 * (a + b)};
  d.radius_ = 0.5 * (b - a);
  return d;
}

Domain Domain::box(const Point& lo, const Point& hi) {
  if (lo.dim() != hi.dim()) throw DimensionError("box corners differ in dimension");
  for (std::size_t i = 0; i < lo.dim(); ++i) {
    if (!(lo[i] < hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i])) {
      throw std::invalid_argument("box requires finite lo[i] < hi[i] for every axis");
    }
  }
  Domain d;
  d.kind_ = DomainKind::Box;
  d.lo_ = lo;
  d.hi_ = hi;
  d.center_ = 0.5 * (lo + hi);
  return d;
}

Domain Domain::ball(const Point& center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius) || !center.is_finite()) {
    throw std::invalid_argument("ball requires a finite centre and radius > 0");
  }
  Domain d;
  d.kind_ = DomainKind::Ball;
  d.center_ = center;
  d.radius_ = radius;
  d.lo_ = center;
  d.hi_ = center;
  for (std::size_t i = 0; i < center.dim(); ++i) {
    d.lo_[i] -= radius;
    d.hi_[i] += radius;
  }
  return d;
}

Domain Domain::with_boundary_tolerance(double tol) const {
  if (!(tol >= 0.0)) throw std::invalid_argument("boundary tolerance must be >= 0");
  Domain d = *this;
  d.tol_ = tol;
  return d;
}

void Domain::check_dim(const Point& x) const {
  if (x.dim() != dim()) {
    throw DimensionError("point " + x.to_string() + " has dimension " + std::to_string(x.dim()) +
                         ", domain has dimension " + std::to_string(dim()));
  }
}

double Domain::ball_slack() const {
  return tol_ > 0.0 ? tol_ : 8.0 * std::numeric_limits<double>::epsilon() * radius_;
}

bool Domain::contains(const Point& x) const {
  check_dim(x);
  switch (kind_) {
    case DomainKind::Interval:
    case DomainKind::Box:
      for (std::size_t i = 0; i < dim(); ++i) {
        if (!(x[i] > lo_[i] + tol_ && x[i] < hi_[i] - tol_)) return false;
      }
      return true;
    case DomainKind::Ball:
      return distance(x, center_) < radius_ - ball_slack();
  }
  return false;
}

bool Domain::on_boundary(const Point& x) const {
  check_dim(x);
  switch (kind_) {
    case DomainKind::Interval:
    case DomainKind::Box: {
      bool touches = false;
      for (std::size_t i = 0; i < dim(); ++i) {
        if (x[i] < lo_[i] - tol_ || x[i] > hi_[i] + tol_) return false;
        if (x[i] <= lo_[i] + tol_ || x[i] >= hi_[i] - tol_) touches = true;
      }
      return touches;
    }
    case DomainKind::Ball:
      return std::abs(distance(x, center_) - radius_) <= ball_slack();
  }
  return false;
}

double Domain::interior_distance(const Point& x) const {
  switch (kind_) {
    case DomainKind::Interval:
    case DomainKind::Box: {
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < dim(); ++i) {
        d = std::min(d, std::min(x[i] - lo_[i], hi_[i] - x[i]));
      }
      return d;
    }
    case DomainKind::Ball:
      return radius_ - distance(x, center_);
  }
  return 0.0;
}

double Domain::boundary_distance(const Point& x) const {
  if (on_boundary(x)) return 0.0;
  if (!contains(x)) throw OutsideClosureError("point " + x.to_string() + " lies outside E");
  return std::max(0.0, interior_distance(x));
}

Point Domain::project_to_boundary(const Point& x) const {
  check_dim(x);
  switch (kind_) {
    case DomainKind::Interval:
    case DomainKind::Box: {
      bool outside = false;
      Point p = x;
      for (std::size_t i = 0; i < dim(); ++i) {
        if (x[i] < lo_[i]) {
          p[i] = lo_[i];
          outside = true;
        } else if (x[i] > hi_[i]) {
          p[i] = hi_[i];
          outside = true;
        }
      }
      if (outside) return p;
      // Inside (or on) the box: snap the nearest face.
      std::size_t best_axis = 0;
      double best = std::numeric_limits<double>::infinity();
      bool best_low = true;
      for (std::size_t i = 0; i < dim(); ++i) {
        const double dl = x[i] - lo_[i];
        const double dh = hi_[i] - x[i];
        if (dl < best) {
          best = dl;
          best_axis = i;
          best_low = true;
        }
        if (dh < best) {
          best = dh;
          best_axis = i;
          best_low = false;
        }
      }
      p[best_axis] = best_low ? lo_[best_axis] : hi_[best_axis];
      return p;
    }
    case DomainKind::Ball: {
      Point v = x - center_;
      const double r = norm(v);
      if (r == 0.0) {
        Point p = center_;
        p[0] += radius_;
        return p;
      }
      return center_ + (radius_ / r) * v;
    }
  }
  return x;
}

double Domain::diameter() const {
  if (kind_ == DomainKind::Ball) return 2.0 * radius_;
  return distance(lo_, hi_);
}

std::string Domain::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case DomainKind::Interval:
      os << "Interval(" << lo_[0] << ", " << hi_[0] << ")";
      break;
    case DomainKind::Box:
      os << "Box(" << lo_.to_string() << ", " << hi_.to_string() << ")";
      break;
    case DomainKind::Ball:
      os << "Ball(" << center_.to_string() << ", " << radius_ << ")";
      break;
  }
  return os.str();
}

}  // namespace nlbranch
