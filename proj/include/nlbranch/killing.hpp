#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nlbranch/domain.hpp"

namespace nlbranch {

/// Killing (branching) rate c: bounded, nonnegative on D, zero off D.
class KillingRate {
 public:
  /// c = c1 on D. c1 = 0 is allowed and switches branching off entirely.
  static KillingRate constant_on_D(double c1);

  /// Piecewise constant in coordinate `axis`: values[i] on
  /// [breaks[i-1], breaks[i]), with values.size() == breaks.size() + 1.
  static KillingRate piecewise(std::vector<double> breaks, std::vector<double> values,
                               std::size_t axis = 0);

  static KillingRate function(std::function<double(const Point&)> fn, double c_max,
                              std::string label = "function");

  bool is_constant() const { return kind_ == Kind::Constant; }
  double c_max() const { return c_max_; }

  /// Rate at a point already known to lie in D.
  double in_D(const Point& x) const {
    switch (kind_) {
      case Kind::Constant:
        return c1_;
      case Kind::Piecewise: {
        const double v = x[axis_];
        std::size_t i = 0;
        while (i < breaks_.size() && v >= breaks_[i]) ++i;
        return values_[i];
      }
      case Kind::Function:
        return fn_(x);
    }
    return 0.0;
  }

  /// Rate at any x: zero outside D (and on dD).
  double operator()(const Domain& dom, const Point& x) const {
    return dom.contains(x) ? in_D(x) : 0.0;
  }

  std::string describe() const;

 private:
  enum class Kind { Constant, Piecewise, Function };
  KillingRate() = default;

  Kind kind_ = Kind::Constant;
  double c1_ = 0.0;
  double c_max_ = 0.0;
  std::vector<double> breaks_, values_;
  std::size_t axis_ = 0;
  std::function<double(const Point&)> fn_;
  std::string label_;
};

/// Simulation caps shared by every path simulator.
struct Caps {
  double time_cap = 1.0e3;              // T_max
  std::size_t population_cap = 10'000;  // N_max
  double h = 1.0e-4;                    // time step of discretised motions

  void validate() const;
};

}  // namespace nlbranch
