#include "nlbranch/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "nlbranch/errors.hpp"

namespace nlbranch {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Solves a tridiagonal system with constant off-diagonals `off` in place:
// diag and rhs are overwritten.
void thomas(std::vector<double>& diag, double off, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = off / diag[i - 1];
    diag[i] -= w * off;
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - off * rhs[i + 1]) / diag[i];
}

// Same with varying off-diagonals (lower l, upper u).
void thomas(std::vector<double>& l, std::vector<double>& d, std::vector<double>& u, std::vector<double>& rhs) {
  const std::size_t n = d.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = l[i] / d[i - 1];
    d[i] -= w * u[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - u[i] * rhs[i + 1]) / d[i];
}

// g(w) = sum b_k w^k and g'(w), by Horner.
double branching_poly(const OffspringLaw& law, double w) {
  double acc = 0.0;
  for (int k = law.max_k(); k >= 1; --k) acc = acc * w + law.weight(k);
  return acc * w;
}

double branching_poly_deriv(const OffspringLaw& law, double w) {
  double acc = 0.0;
  for (int k = law.max_k(); k >= 1; --k) acc = acc * w + static_cast<double>(k) * law.weight(k);
  return acc;
}

std::vector<double> rates_on_grid(const KillingRate& rate, const Grid1D& grid) {
  const Domain dom = Domain::interval(grid.a, grid.b);
  std::vector<double> c(grid.m);
  for (std::size_t i = 0; i < grid.m; ++i) c[i] = rate(dom, Point{grid.node(i + 1)});
  return c;
}

void check_size(const GridFunction& w, const Grid1D& grid) {
  if (w.size() != grid.size()) throw std::invalid_argument("grid function has the wrong size");
}

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

}  // namespace

void Grid1D::validate() const {
  if (!(b > a) || m < 1 || !(dt > 0.0)) throw std::invalid_argument("grid needs b > a, m >= 1, dt > 0");
}

GridFunction sample_on_grid(const Grid1D& grid, const std::function<double(double)>& f) {
  GridFunction w(grid.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = f(grid.node(i));
  return w;
}

double interpolate(const Grid1D& grid, const GridFunction& w, double x) {
  check_size(w, grid);
  if (x < grid.a || x > grid.b) throw OutsideClosureError("interpolation point outside the grid");
  const double s = (x - grid.a) / grid.dx();
  const auto i = std::min(static_cast<std::size_t>(s), grid.m);
  const double frac = s - static_cast<double>(i);
  return (1.0 - frac) * w[i] + frac * w[i + 1];
}

PicardResult picard_duhamel_1d(const GridFunction& f, double t, const OffspringLaw& law, const KillingRate& rate,
                               const Grid1D& grid, const PicardOptions& opt) {
  grid.validate();
  check_size(f, grid);
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("picard needs finite t >= 0");
  PicardResult res;
  if (t == 0.0) {
    res.w = f;
    return res;
  }
  const std::size_t m = grid.m;
  const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
  const std::vector<double> c = rates_on_grid(rate, grid);
  const double left = f.front(), right = f.back();

  // Step list: (size, theta) with theta = 1 implicit Euler, 1/2 Crank-Nicolson.
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(t / grid.dt - 1e-9)));
  const double h = t / static_cast<double>(n);
  std::vector<std::pair<double, double>> steps;
  std::size_t cn_from = 0;
  if (opt.rannacher) {
    const std::size_t startup = std::min<std::size_t>(n, 2);
    for (std::size_t i = 0; i < 2 * startup; ++i) steps.emplace_back(0.5 * h, 1.0);
    cn_from = startup;
  }
  for (std::size_t i = cn_from; i < n; ++i) steps.emplace_back(h, 0.5);
  const std::size_t levels = steps.size() + 1;
  res.time_steps = steps.size();

  std::vector<double> prev(levels * m, 0.0), next(levels * m);
  std::vector<double> src_prev(m), src_next(m), diag(m), rhs(m);
  std::vector<double> history;
  for (std::size_t iter = 1; iter <= opt.max_iter; ++iter) {
    std::copy(f.begin() + 1, f.end() - 1, next.begin());
    for (std::size_t j = 0; j < steps.size(); ++j) {
      const auto [dt, theta] = steps[j];
      const double* w0 = &next[j * m];
      const double* p0 = &prev[j * m];
      const double* p1 = &prev[(j + 1) * m];
      for (std::size_t i = 0; i < m; ++i) {
        src_prev[i] = c[i] * branching_poly(law, p0[i]);
        src_next[i] = c[i] * branching_poly(law, p1[i]);
      }
      const double explicit_w = (1.0 - theta) * dt;
      for (std::size_t i = 0; i < m; ++i) {
        const double wl = i > 0 ? w0[i - 1] : left;
        const double wr = i + 1 < m ? w0[i + 1] : right;
        const double lap = (wl - 2.0 * w0[i] + wr) * inv_dx2 - c[i] * w0[i];
        rhs[i] = w0[i] + explicit_w * lap + dt * ((1.0 - theta) * src_prev[i] + theta * src_next[i]);
        diag[i] = 1.0 + theta * dt * (2.0 * inv_dx2 + c[i]);
      }
      rhs[0] += theta * dt * left * inv_dx2;
      rhs[m - 1] += theta * dt * right * inv_dx2;
      thomas(diag, -theta * dt * inv_dx2, rhs);
      std::copy(rhs.begin(), rhs.end(), next.begin() + static_cast<std::ptrdiff_t>((j + 1) * m));
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) diff = std::max(diff, std::abs(next[i] - prev[i]));
    prev.swap(next);
    history.push_back(diff);
    res.iterations = iter;
    res.last_diff = diff;
    if (!std::isfinite(diff)) throw OracleError("picard iteration produced a non-finite iterate");
    if (diff < opt.tol) break;
    if (history.size() > 50 && diff > history[history.size() - 51]) {
      std::ostringstream os;
      os << "picard iteration is not contracting: sup-norm change " << diff << " at sweep " << iter
         << " exceeds " << history[history.size() - 51] << " at sweep " << iter - 50;
      throw OracleError(os.str());
    }
    if (iter == opt.max_iter) {
      std::ostringstream os;
      os << "picard iteration did not reach tolerance " << opt.tol << " in " << iter << " sweeps (last change "
         << diff << ")";
      throw OracleError(os.str());
    }
  }
  res.w.resize(grid.size());
  res.w.front() = left;
  res.w.back() = right;
  std::copy(prev.end() - static_cast<std::ptrdiff_t>(m), prev.end(), res.w.begin() + 1);
  return res;
}

double residual_check(const GridFunction& u, const KillingRate& rate, const OffspringLaw& law, const Grid1D& grid) {
  grid.validate();
  check_size(u, grid);
  const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
  const std::vector<double> c = rates_on_grid(rate, grid);
  double sup = 0.0;
  for (std::size_t i = 1; i <= grid.m; ++i) {
    const double r = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2 - c[i - 1] * u[i] +
                     c[i - 1] * branching_poly(law, u[i]);
    sup = std::max(sup, std::abs(r));
  }
  return sup;
}

NewtonResult newton_bvp_1d(double phi0, double phi1, const KillingRate& rate, const OffspringLaw& law,
                           const Grid1D& grid) {
  grid.validate();
  const std::size_t m = grid.m;
  const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
  const std::vector<double> c = rates_on_grid(rate, grid);
  NewtonResult res;
  res.u = sample_on_grid(grid, [&](double x) {
    const double s = (x - grid.a) / (grid.b - grid.a);
    return (1.0 - s) * phi0 + s * phi1;
  });
  res.u.front() = phi0;
  res.u.back() = phi1;

  auto residual = [&](const GridFunction& u, std::vector<double>& F) {
    double sup = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
      F[i - 1] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2 - c[i - 1] * u[i] + c[i - 1] * branching_poly(law, u[i]);
      sup = std::max(sup, std::abs(F[i - 1]));
    }
    return sup;
  };
  std::vector<double> F(m), lo(m), d(m), up(m), delta(m);
  GridFunction trial(grid.size());
  double norm_f = residual(res.u, F);
  for (std::size_t iter = 0;; ++iter) {
    double umax = 0.0;
    for (double v : res.u) umax = std::max(umax, std::abs(v));
    // Rounding floor of the central difference.
    const double target = std::max(1e-10, 64.0 * std::numeric_limits<double>::epsilon() * umax * inv_dx2);
    res.residual = norm_f;
    res.iterations = iter;
    if (norm_f < target) return res;
    if (iter == 200) {
      std::ostringstream os;
      os << "newton stagnated: residual " << norm_f << " after 200 iterations";
      throw OracleError(os.str());
    }
    for (std::size_t i = 0; i < m; ++i) {
      lo[i] = up[i] = inv_dx2;
      d[i] = -2.0 * inv_dx2 - c[i] + c[i] * branching_poly_deriv(law, res.u[i + 1]);
      delta[i] = -F[i];
    }
    thomas(lo, d, up, delta);
    double lambda = 1.0;
    for (int halving = 0;; ++halving) {
      trial = res.u;
      for (std::size_t i = 0; i < m; ++i) trial[i + 1] += lambda * delta[i];
      const double trial_norm = residual(trial, F);
      if (trial_norm <= (1.0 - 0.5 * lambda) * norm_f || halving == 30) {
        res.u.swap(trial);
        norm_f = trial_norm;
        break;
      }
      lambda *= 0.5;
    }
  }
}

double poisson_disk_integral(const Domain& disk, const std::function<double(double)>& g, const Point& x,
                             const QuadratureOptions& opt) {
  if (disk.kind() != DomainKind::Ball || disk.dim() != 2) throw DimensionError("poisson integral needs a 2D disk");
  if (x.dim() != 2) throw DimensionError("poisson integral needs a 2D point");
  const Point w = x - disk.center();
  const double R = disk.radius();
  const double rho2 = dot(w, w);
  if (!(std::sqrt(rho2) < R)) throw OutsideClosureError("poisson integral needs x inside the disk");

  auto integrand = [&](double th) {
    const double dx = R * std::cos(th) - w[0];
    const double dy = R * std::sin(th) - w[1];
    return (R * R - rho2) / (dx * dx + dy * dy) * g(th) / kTwoPi;
  };

  std::vector<double> cuts{0.0, kTwoPi};
  for (double b : opt.breaks) cuts.push_back(wrap_angle(b));
  for (double s : opt.singular) cuts.push_back(wrap_angle(s));
  // Resolve the kernel peak, whose width is the relative boundary distance.
  const double d = (R - std::sqrt(rho2)) / R;
  const double theta_x = std::atan2(w[1], w[0]);
  if (d < 0.5) {
    cuts.push_back(wrap_angle(theta_x));
    for (double s = d; s < std::numbers::pi; s *= 4.0) {
      cuts.push_back(wrap_angle(theta_x + s));
      cuts.push_back(wrap_angle(theta_x - s));
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double p, double q) { return q - p < 1e-15; }), cuts.end());

  auto is_singular = [&](double a) {
    for (double s : opt.singular) {
      const double ws = wrap_angle(s);
      if (std::abs(a - ws) < 1e-14 || std::abs(std::abs(a - ws) - kTwoPi) < 1e-14) return true;
    }
    return false;
  };

  const double piece_tol = std::max(1e-15, opt.tol * 1e-3);
  boost::math::quadrature::tanh_sinh<double> ts;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b - a <= 0.0) continue;
    double err = 0.0;
    double v = 0.0;
    if (is_singular(a) || is_singular(b)) {
      v = ts.integrate(integrand, a, b, piece_tol, &err);
    } else {
      v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, b, 15, piece_tol, &err);
    }
    total += v;
  }
  return total;
}

double poisson_disk(const Domain& disk, const BoundaryData& phi, const Point& x) {
  QuadratureOptions opt;
  opt.tol = 1e-8;
  for (const Point& j : phi.jump_set(disk)) opt.breaks.push_back(polar_angle(disk, j));
  const Point c = disk.center();
  const double R = disk.radius();
  return poisson_disk_integral(
      disk,
      [&](double th) {
        Point y{c[0] + R * std::cos(th), c[1] + R * std::sin(th)};
        return phi.boundary_value(disk, y);
      },
      x, opt);
}

double exit_kernel_flow_exact(const Flow& flow, const Domain& dom, double c1,
                              const std::function<double(const Point&)>& f, const Point& x, double cap_M) {
  const ExitRecord rec = flow_entry_time(flow, dom, x, cap_M);
  return std::exp(-c1 * rec.exit_time) * f(rec.exit_point);
}

double expected_exp_exit_interval(double c, double x, double a, double b) {
  if (!(c >= 0.0)) throw std::invalid_argument("rate must be >= 0");
  if (x < a || x > b) throw OutsideClosureError("point outside the interval");
  const double s = std::sqrt(c);
  return std::cosh(s * (x - 0.5 * (a + b))) / std::cosh(s * 0.5 * (b - a));
}

}  // namespace nlbranch
