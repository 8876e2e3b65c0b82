#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nlbranch/boundary_data.hpp"
#include "nlbranch/branching.hpp"

namespace nlbranch {

struct EstimatorResult {
  double mean = 0.0;
  double std_error = 0.0;         // sample stddev / sqrt(n_effective)
  std::size_t n_effective = 0;    // realizations entering the mean
  double truncated_fraction = 0.0;
  std::size_t n_total = 0;
  std::uint64_t clamps = 0;
  std::uint64_t branch_events = 0;
};

struct RunOptions {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  /// Separates independent experiments sharing a seed.
  std::uint64_t tag = 0;
};

/// Stream of realization i; identical for every thread count.
inline RandomStream realization_stream(const RunOptions& opt, std::uint64_t i) {
  return RandomStream(opt.seed, substream_key(opt.tag, i));
}

struct GuardReport {
  bool exact = false;       // closed-form bound (flows) rather than a pilot
  double epsilon = 0.0;     // lower bound / estimate of P(tau < R)
  double std_error = 0.0;
  double threshold = 0.01;
  Point worst_point;
  bool passed() const { return epsilon - 3.0 * std_error > threshold; }
  std::string describe() const;
};

struct GuardOptions {
  bool enabled = true;
  std::size_t pilot_n = 2000;
  double threshold = 0.01;
};

/// Nagasawa guard: a lower bound on the probability of reaching dD before
/// the killing time. Flows: exactly exp(-M c_max). Brownian motion: pilot
/// estimate of E[exp(-int c)] at each probe and at the domain centre, the
/// smallest one reported.
GuardReport nagasawa_guard(const Model& model, const std::vector<Point>& probes,
                           const GuardOptions& opt, const RunOptions& run);

/// Pilot estimate of E^x[exp(-int_0^tau c(Y_s) ds)] for Brownian motion.
EstimatorResult exp_exit_pilot(const Model& model, const Point& x, std::size_t n,
                               const RunOptions& run);

/// E^{mu}[prod f(X_t)] from an arbitrary initial configuration.
EstimatorResult estimate_functional(const Model& model, const Configuration& init,
                                    const std::function<double(const Point&)>& f, double t,
                                    std::size_t n, const RunOptions& run);

/// H_t f(x). f must map E into [0, 1].
EstimatorResult estimate_Ht(const Model& model, const Point& x,
                            const std::function<double(const Point&)>& f, double t,
                            std::size_t n, const RunOptions& run);

struct SolveReport {
  EstimatorResult result;
  GuardReport guard;
  ValidityReport validity;
};

/// u(x) = lim r E[prod (phi/r)(X_t)], run to absorption. `model.law` is the
/// base law; it is r-scaled here. Throws ValidationError when the scaled
/// law, the range of phi or the guard rules the solve out.
SolveReport estimate_u(const Model& model, const Point& x, const BoundaryData& phi, double r,
                       std::size_t n, const RunOptions& run, const GuardOptions& guard = {});

/// Flow case through the pure branching process composed with the stopped
/// flow, evaluated at t = M + margin.
SolveReport estimate_u_flow_pure(const Model& model, const Point& x, const BoundaryData& phi,
                                 double r, std::size_t n, ClockMode mode, const RunOptions& run);

/// Horizon used by estimate_u_flow_pure for a given bound M.
inline double flow_pure_horizon(double M) { return M + 1e-6 * (1.0 + M); }

/// Bound M on the entry time: closed form when available, else cap_M.
double flow_entry_bound(const Model& model);

/// P^c_tau f(x) = E[exp(-int c) f(Y_tau)]. Deterministic motions are
/// evaluated once, with zero standard error.
EstimatorResult exit_kernel_mc(const Model& model, const Point& x,
                               const std::function<double(const Point&)>& f, std::size_t n,
                               const RunOptions& run);

}  // namespace nlbranch
