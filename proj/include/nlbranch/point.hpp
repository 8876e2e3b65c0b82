#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>

namespace nlbranch {

/// Largest spatial dimension supported by the fixed-capacity Point.
inline constexpr std::size_t kMaxDim = 4;

/// A point of R^d (d <= kMaxDim) stored inline, so particle states never allocate.
class Point {
 public:
  Point() = default;

  explicit Point(std::size_t dim) : dim_(checked_dim(dim)) {}

  Point(std::initializer_list<double> coords) : dim_(checked_dim(coords.size())) {
    std::copy(coords.begin(), coords.end(), c_.begin());
  }

  static Point from(std::span<const double> coords) {
    Point p(coords.size());
    std::copy(coords.begin(), coords.end(), p.c_.begin());
    return p;
  }

  std::size_t dim() const { return dim_; }
  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }

  std::span<const double> coords() const { return {c_.data(), dim_}; }
  std::span<double> coords() { return {c_.data(), dim_}; }

  bool is_finite() const {
    return std::all_of(c_.begin(), c_.begin() + dim_, [](double v) { return std::isfinite(v); });
  }

  Point& operator+=(const Point& o) {
    for (std::size_t i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Point& operator-=(const Point& o) {
    for (std::size_t i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Point& operator*=(double s) {
    for (std::size_t i = 0; i < dim_; ++i) c_[i] *= s;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend Point operator*(double s, Point a) { return a *= s; }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.dim_ != b.dim_) return false;
    return std::equal(a.c_.begin(), a.c_.begin() + a.dim_, b.c_.begin());
  }

  std::string to_string() const;

 private:
  static std::uint8_t checked_dim(std::size_t d) {
    if (d == 0 || d > kMaxDim) {
      throw std::invalid_argument("point dimension must be in [1, " + std::to_string(kMaxDim) +
                                  "], got " + std::to_string(d));
    }
    return static_cast<std::uint8_t>(d);
  }

  std::array<double, kMaxDim> c_{};
  std::uint8_t dim_ = 0;
};

inline double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }

inline double distance(const Point& a, const Point& b) { return norm(a - b); }

}  // namespace nlbranch
