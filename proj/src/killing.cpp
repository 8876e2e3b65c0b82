#include "nlbranch/killing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlbranch {

KillingRate KillingRate::constant_on_D(double c1) {
  if (!(c1 >= 0.0) || !std::isfinite(c1)) {
    throw std::invalid_argument("killing rate must be finite and >= 0");
  }
  KillingRate c;
  c.kind_ = Kind::Constant;
  c.c1_ = c1;
  c.c_max_ = c1;
  return c;
}

KillingRate KillingRate::piecewise(std::vector<double> breaks, std::vector<double> values,
                                   std::size_t axis) {
  if (values.size() != breaks.size() + 1) {
    throw std::invalid_argument("piecewise rate needs one more value than breakpoints");
  }
  if (!std::is_sorted(breaks.begin(), breaks.end())) {
    throw std::invalid_argument("piecewise rate breakpoints must be sorted");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("piecewise rate values must be finite and >= 0");
    }
  }
  KillingRate c;
  c.kind_ = Kind::Piecewise;
  c.c_max_ = *std::max_element(values.begin(), values.end());
  c.breaks_ = std::move(breaks);
  c.values_ = std::move(values);
  c.axis_ = axis;
  return c;
}

KillingRate KillingRate::function(std::function<double(const Point&)> fn, double c_max,
                                  std::string label) {
  if (!(c_max >= 0.0) || !std::isfinite(c_max)) {
    throw std::invalid_argument("c_max must be finite and >= 0");
  }
  KillingRate c;
  c.kind_ = Kind::Function;
  c.fn_ = std::move(fn);
  c.c_max_ = c_max;
  c.label_ = std::move(label);
  return c;
}

std::string KillingRate::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Constant:
      os << "ConstantOnD(" << c1_ << ")";
      break;
    case Kind::Piecewise:
      os << "Piecewise(axis " << axis_ << ", " << values_.size() << " pieces, c_max " << c_max_ << ")";
      break;
    case Kind::Function:
      os << "BoundedFunction(" << label_ << ", c_max " << c_max_ << ")";
      break;
  }
  return os.str();
}

void Caps::validate() const {
  if (!(time_cap > 0.0) || population_cap == 0 || !(h > 0.0)) {
    throw std::invalid_argument("caps must be positive (T_max, N_max, h)");
  }
}

}  // namespace nlbranch
