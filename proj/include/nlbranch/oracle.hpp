#pragma once

#include <functional>
#include <vector>

#include "nlbranch/boundary_data.hpp"
#include "nlbranch/killing.hpp"
#include "nlbranch/mechanism.hpp"
#include "nlbranch/motion.hpp"

namespace nlbranch {

/// Uniform grid on [a, b] with m interior nodes; node 0 and node m+1 sit on
/// the boundary. Time stepping is Crank-Nicolson (unconditionally stable),
/// so dt is bounded by accuracy only.
struct Grid1D {
  double a = 0.0;
  double b = 1.0;
  std::size_t m = 199;
  double dt = 1e-3;

  double dx() const { return (b - a) / static_cast<double>(m + 1); }
  double node(std::size_t i) const { return a + static_cast<double>(i) * dx(); }
  std::size_t size() const { return m + 2; }
  void validate() const;
};

/// Values at all m+2 nodes, boundary nodes included.
using GridFunction = std::vector<double>;

GridFunction sample_on_grid(const Grid1D& grid, const std::function<double(double)>& f);

/// Linear interpolation of a grid function at x in [a, b].
double interpolate(const Grid1D& grid, const GridFunction& w, double x);

struct PicardOptions {
  double tol = 1e-10;
  std::size_t max_iter = 2000;
  /// Replace the first two Crank-Nicolson steps by four implicit Euler
  /// half steps; damps the oscillations of non-smooth initial data.
  bool rannacher = true;
};

struct PicardResult {
  GridFunction w;
  std::size_t iterations = 0;
  double last_diff = 0.0;
  std::size_t time_steps = 0;
};

/// w_t = T^c_t f + int_0^t T^c_s(c sum b_k w_{t-s}^k) ds for the heat
/// semigroup of d^2/dx^2 killed at rate c, Dirichlet data f at the ends.
/// Global-in-time fixed point: each sweep is one linear Crank-Nicolson solve
/// over [0, t] with the source taken from the previous sweep.
PicardResult picard_duhamel_1d(const GridFunction& f, double t, const OffspringLaw& law,
                               const KillingRate& rate, const Grid1D& grid,
                               const PicardOptions& opt = {});

struct NewtonResult {
  GridFunction u;
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// u'' - c u + c sum b_k u^k = 0 on (a, b), u(a) = phi0, u(b) = phi1, by
/// damped Newton on central differences.
NewtonResult newton_bvp_1d(double phi0, double phi1, const KillingRate& rate, const OffspringLaw& law,
                           const Grid1D& grid);

/// sup over interior nodes of |D2 u - c u + c sum b_k u^k|.
double residual_check(const GridFunction& u, const KillingRate& rate, const OffspringLaw& law,
                      const Grid1D& grid);

struct QuadratureOptions {
  double tol = 1e-8;
  /// Angles where the integrand is singular or discontinuous.
  std::vector<double> breaks;
  std::vector<double> singular;
};

/// (1/2pi) int_0^{2pi} P(x, theta) g(theta) dtheta on the disk `disk`
/// (2D ball), with P the Poisson kernel. The interval is split at every
/// break, singular point and around the angle of x on the scale of its
/// boundary distance.
double poisson_disk_integral(const Domain& disk, const std::function<double(double)>& g, const Point& x,
                             const QuadratureOptions& opt);

/// H_D phi(x) for boundary data on a disk; tolerance 1e-8.
double poisson_disk(const Domain& disk, const BoundaryData& phi, const Point& x);

/// exp(-c1 tau(x)) f(phi_tau(x)(x)).
double exit_kernel_flow_exact(const Flow& flow, const Domain& dom, double c1,
                              const std::function<double(const Point&)>& f, const Point& x,
                              double cap_M);

/// E^x[exp(-c tau)] for the Laplacian on (a, b), constant c >= 0.
double expected_exp_exit_interval(double c, double x, double a = 0.0, double b = 1.0);

}  // namespace nlbranch
