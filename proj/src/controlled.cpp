#include "nlbranch/controlled.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nlbranch/errors.hpp"
#include "nlbranch/oracle.hpp"

namespace nlbranch {
namespace {

// Least-squares slope of log(ys) against log(xs).
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

std::vector<double> geometric_distances(std::size_t n, double d_max, double d_min) {
  if (n < 2 || !(d_max > d_min) || !(d_min > 0.0)) {
    throw std::invalid_argument("approach sequence needs n >= 2 and d_max > d_min > 0");
  }
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = d_max * std::pow(d_min / d_max, static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return d;
}

Point inward_normal(const Domain& dom, const Point& y) {
  if (!dom.on_boundary(y)) throw OutsideClosureError("approach target " + y.to_string() + " is not on dD");
  if (dom.kind() == DomainKind::Ball) return (1.0 / dom.radius()) * (dom.center() - y);
  Point nrm(y.dim());
  std::size_t best = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  double sign = 1.0;
  for (std::size_t i = 0; i < y.dim(); ++i) {
    const double lo_gap = std::abs(y[i] - dom.lo()[i]);
    const double hi_gap = std::abs(dom.hi()[i] - y[i]);
    if (lo_gap < best_gap) {
      best_gap = lo_gap;
      best = i;
      sign = 1.0;
    }
    if (hi_gap < best_gap) {
      best_gap = hi_gap;
      best = i;
      sign = -1.0;
    }
  }
  nrm[best] = sign;
  return nrm;
}

template <class T>
bool strictly_increasing(const std::vector<T>& v, std::size_t from) {
  for (std::size_t i = from + 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

template <class T>
bool strictly_decreasing(const std::vector<T>& v, std::size_t from) {
  for (std::size_t i = from + 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

std::vector<double> tail_of(const std::vector<double>& v, std::size_t from) {
  return {v.begin() + static_cast<std::ptrdiff_t>(from), v.end()};
}

Verdict judge(const Evaluator& u, const Domain& dom, const BoundaryData& phi, const ControlFunction* k,
              const ApproachSequence& seq, const ControlOptions& opt) {
  const std::size_t n = seq.points.size();
  if (n < 2) throw std::invalid_argument("approach sequence needs at least two points");
  Verdict v;
  v.target_value = phi.boundary_value(dom, seq.target);
  std::vector<Evaluation> evals;
  for (const Point& x : seq.points) {
    if (!dom.contains(x)) throw ValidationError("sequence_leaves_domain", "point " + x.to_string() + " is not in D");
    const double kx = k ? (*k)(x) : 0.0;
    if (!std::isfinite(kx)) {
      throw ValidationError("sequence_leaves_control_domain", "k is infinite at " + x.to_string());
    }
    const Evaluation e = u(x);
    evals.push_back(e);
    v.dist.push_back(distance(x, seq.target));
    v.u.push_back(e.value);
    v.k.push_back(kx);
    v.tol.push_back(opt.tol.at(e));
  }
  const std::size_t from = n - std::min(std::max<std::size_t>(opt.tail, 2), n);
  const std::vector<double> dist_tail = tail_of(v.dist, from);
  const std::vector<double> k_tail = tail_of(v.k, from);
  bool k_positive = true;
  for (double kv : k_tail) k_positive = k_positive && kv > 0.0;
  v.k_slope = k_positive ? -loglog_slope(dist_tail, k_tail) : 0.0;
  v.last_k = v.k.back();
  v.k_divergent = v.last_k > opt.k_cap || (k_positive && strictly_increasing(v.k, from) && v.k_slope >= opt.slope_min);
  v.last_value = v.u.back();
  const double rho = v.dist[n - 1] / v.dist[n - 2];
  v.extrapolated = (v.u[n - 1] - rho * v.u[n - 2]) / (1.0 - rho);

  std::vector<double> ratio(n);
  for (std::size_t i = 0; i < n; ++i) ratio[i] = std::abs(v.u[i]) / (1.0 + v.k[i]);
  v.last_ratio = ratio.back();

  std::ostringstream os;
  os.precision(6);
  if (!v.k_divergent) {
    const double tol = v.tol.back();
    const double err = std::abs(v.last_value - v.target_value);
    const double err_lim = std::abs(v.extrapolated - v.target_value);
    if (err <= tol || err_lim <= tol) {
      v.kind = VerdictKind::PassStar;
    } else {
      for (std::size_t i = from; i < n; ++i) {
        if (std::abs(v.u[i] - v.target_value) > v.tol[i]) {
          v.offending = i;
          break;
        }
      }
    }
    os << "k bounded (last " << v.last_k << "); |u - phi(y)| = " << err << ", extrapolated " << err_lim
       << ", tol " << tol;
  } else {
    std::vector<double> r_tail = tail_of(ratio, from);
    bool r_positive = true;
    for (double r : r_tail) r_positive = r_positive && r > 0.0;
    v.ratio_slope = r_positive ? loglog_slope(dist_tail, r_tail) : 0.0;
    const double tol = v.tol.back();
    if (v.last_ratio <= tol || (r_positive && strictly_decreasing(ratio, from) && v.ratio_slope >= opt.slope_min)) {
      v.kind = VerdictKind::PassStarStar;
    } else {
      for (std::size_t i = from; i < n; ++i) {
        if (ratio[i] > v.tol[i]) {
          v.offending = i;
          break;
        }
      }
    }
    os << "k divergent (last " << v.last_k << ", slope " << v.k_slope << "); u/(1+k) = " << v.last_ratio
       << ", decay slope " << v.ratio_slope << ", tol " << tol;
  }
  v.detail = os.str();
  return v;
}

}  // namespace

BoundaryMap distance_power(std::vector<Point> points, double p) {
  if (!(p >= 0.0)) throw std::invalid_argument("control exponent must be >= 0");
  BoundaryMap g;
  g.exponent = p;
  g.singular = points;
  std::ostringstream os;
  os << "dist^-" << p;
  g.label = os.str();
  g.fn = [pts = std::move(points), p](const Point& y) {
    if (pts.empty()) return 0.0;
    double d = std::numeric_limits<double>::infinity();
    for (const Point& q : pts) d = std::min(d, distance(y, q));
    return std::pow(d, -p);
  };
  if (g.singular.empty() || p == 0.0) g.singular.clear();
  return g;
}

BoundaryMap constant_map(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) throw std::invalid_argument("control must be finite and >= 0");
  BoundaryMap g;
  g.fn = [value](const Point&) { return value; };
  g.label = "constant";
  return g;
}

ControlFunction build_control(const BoundaryMap& g, const Domain& dom, std::optional<FlowCase> flow) {
  ControlFunction c;
  c.g = g;
  c.label = g.label;
  if (flow) {
    const Flow* fl = flow->flow;
    const double cap = flow->cap_M;
    c.k = [g, dom, fl, cap](const Point& x) { return g.fn(flow_entry_time(*fl, dom, x, cap).exit_point); };
    c.blow_up_set = g.singular;
    return c;
  }
  if (dom.kind() == DomainKind::Interval) {
    const double a = dom.lo()[0], b = dom.hi()[0];
    const double ga = g.fn(Point{a}), gb = g.fn(Point{b});
    if (!std::isfinite(ga) || !std::isfinite(gb)) {
      throw ValidationError("unsupported_control", "control is infinite at an interval endpoint, so k is infinite on D");
    }
    c.k = [a, b, ga, gb](const Point& x) { return (ga * (b - x[0]) + gb * (x[0] - a)) / (b - a); };
    return c;
  }
  if (dom.kind() == DomainKind::Ball && dom.dim() == 2) {
    if (!g.singular.empty() && g.exponent >= 1.0) {
      throw ValidationError("unsupported_control",
                            "dist^-p with p >= 1 is not integrable on the circle, so k is infinite on D");
    }
    QuadratureOptions opt;
    opt.tol = 1e-5;
    for (const Point& s : g.singular) opt.singular.push_back(polar_angle(dom, s));
    c.k = [g, dom, opt](const Point& x) {
      const Point ctr = dom.center();
      const double R = dom.radius();
      return poisson_disk_integral(
          dom,
          [&](double th) {
            const double v = g.fn(Point{ctr[0] + R * std::cos(th), ctr[1] + R * std::sin(th)});
            return std::isfinite(v) ? v : 0.0;  // a single angle carries no mass
          },
          x, opt);
    };
    c.blow_up_set = g.singular;
    return c;
  }
  throw ValidationError("unsupported_control", "H_D g is available on intervals and 2D disks only, got " + dom.describe());
}

ApproachSequence radial_sequence(const Domain& dom, const Point& y, std::size_t n, double d_max, double d_min) {
  const Point nrm = inward_normal(dom, y);
  std::vector<Point> pts;
  for (double d : geometric_distances(n, d_max, d_min)) pts.push_back(y + d * nrm);
  ApproachSequence s = custom_sequence(dom, y, std::move(pts));
  s.style = ApproachStyle::Radial;
  return s;
}

ApproachSequence skewed_sequence(const Domain& disk, const Point& y, std::size_t n, double d_max, double d_min,
                                 double skew) {
  if (disk.kind() != DomainKind::Ball || disk.dim() != 2) throw DimensionError("skewed sequences need a 2D disk");
  const double theta = polar_angle(disk, y);
  const Point c = disk.center();
  const double R = disk.radius();
  std::vector<Point> pts;
  for (double d : geometric_distances(n, d_max, d_min)) {
    const double a = theta + skew * std::sqrt(d);
    pts.push_back(Point{c[0] + (R - d) * std::cos(a), c[1] + (R - d) * std::sin(a)});
  }
  ApproachSequence s = custom_sequence(disk, y, std::move(pts));
  s.style = ApproachStyle::TangentiallySkewed;
  return s;
}

ApproachSequence custom_sequence(const Domain& dom, const Point& y, std::vector<Point> points) {
  if (!dom.on_boundary(y)) throw OutsideClosureError("approach target " + y.to_string() + " is not on dD");
  double prev = std::numeric_limits<double>::infinity();
  for (const Point& x : points) {
    if (!dom.contains(x)) throw ValidationError("sequence_leaves_domain", "point " + x.to_string() + " is not in D");
    const double d = distance(x, y);
    if (!(d < prev)) throw std::invalid_argument("approach distances must decrease strictly");
    prev = d;
  }
  ApproachSequence s;
  s.target = y;
  s.points = std::move(points);
  s.style = ApproachStyle::Custom;
  return s;
}

std::string to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::PassStar:
      return "PASS-(*)";
    case VerdictKind::PassStarStar:
      return "PASS-(**)";
    case VerdictKind::Fail:
      return "FAIL";
  }
  return "FAIL";
}

std::vector<Verdict> check_controlled(const Evaluator& u, const Domain& dom, const BoundaryData& phi,
                                      const ControlFunction& k, const std::vector<ApproachSequence>& seqs,
                                      const ControlOptions& opt) {
  std::vector<Verdict> out;
  for (const auto& s : seqs) out.push_back(judge(u, dom, phi, &k, s, opt));
  return out;
}

PointwiseVerdict check_pointwise_boundary(const Evaluator& u, const Domain& dom, const BoundaryData& phi,
                                          const std::vector<ApproachSequence>& seqs, const ControlOptions& opt) {
  if (!phi.jump_set(dom).empty()) {
    throw ValidationError("discontinuous_boundary_data", "pointwise check needs continuous boundary data");
  }
  PointwiseVerdict pv;
  for (const auto& s : seqs) {
    pv.sequences.push_back(judge(u, dom, phi, nullptr, s, opt));
    pv.passed = pv.passed && pv.sequences.back().kind == VerdictKind::PassStar;
  }
  return pv;
}

}  // namespace nlbranch
