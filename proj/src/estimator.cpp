#include "nlbranch/estimator.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "nlbranch/errors.hpp"
#include "nlbranch/parallel.hpp"
#include "nlbranch/stats.hpp"

namespace nlbranch {
namespace {

// Stream tags of the auxiliary runs, kept apart from the main estimate.
constexpr std::uint64_t kGuardTag = 0x6775617264ULL;
constexpr std::uint64_t kCommutationTag = 0x636f6d6dULL;

EstimatorResult aggregate(const std::vector<double>& values, const std::vector<std::uint8_t>& truncated) {
  EstimatorResult res;
  res.n_total = values.size();
  std::vector<double> kept;
  kept.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!truncated[i]) kept.push_back(values[i]);
  }
  res.n_effective = kept.size();
  res.truncated_fraction =
      res.n_total ? static_cast<double>(res.n_total - res.n_effective) / static_cast<double>(res.n_total) : 0.0;
  if (kept.empty()) {
    res.mean = std::numeric_limits<double>::quiet_NaN();
    res.std_error = std::numeric_limits<double>::quiet_NaN();
    return res;
  }
  bool constant = true;
  for (double v : kept) constant = constant && v == kept.front();
  if (constant) {
    res.mean = kept.front();
    return res;
  }
  std::vector<double> scratch(kept.size());
  const SampleMoments m = sample_moments(kept, scratch);
  res.mean = m.mean;
  res.std_error = m.stddev / std::sqrt(static_cast<double>(m.n));
  return res;
}

// Runs `one(sim, rng, value) -> truncated` for n realizations.
template <class One>
EstimatorResult run_realizations(const Model& model, std::size_t n, const RunOptions& run, One&& one) {
  if (n == 0) throw std::invalid_argument("estimator needs n >= 1");
  std::vector<double> values(n, 0.0);
  std::vector<std::uint8_t> truncated(n, 0);
  const unsigned threads = std::max(1u, run.threads);
  std::vector<std::unique_ptr<BranchingSimulator>> sims;
  for (unsigned w = 0; w < threads; ++w) sims.push_back(std::make_unique<BranchingSimulator>(model));
  parallel_for_chunks(n, threads, [&](unsigned worker, std::size_t begin, std::size_t end) {
    BranchingSimulator& sim = *sims[worker];
    for (std::size_t i = begin; i < end; ++i) {
      RandomStream rng = realization_stream(run, i);
      truncated[i] = one(sim, rng, values[i]) ? 1 : 0;
    }
  });
  EstimatorResult res = aggregate(values, truncated);
  for (const auto& s : sims) {
    res.clamps += s->diagnostics().clamps;
    res.branch_events += s->diagnostics().branch_events;
  }
  return res;
}

void check_range(const BoundaryData& phi, double r, bool strict) {
  const double sup = phi.sup_bound();
  if (strict ? !(sup < r) : !(sup <= r)) {
    std::ostringstream os;
    os << "boundary data sup " << sup << (strict ? " must be < r = " : " exceeds r = ") << r;
    throw ValidationError("boundary_data_exceeds_r", os.str());
  }
}

void check_flow_rate(const Model& model, const ValidityReport& base_report) {
  if (!model.rate.is_constant()) {
    throw ValidationError("flow_rate_not_constant", "flow solves need a constant rate c1 on D");
  }
  const double c1 = model.rate.c_max();
  if (!(c1 > 0.0) || c1 > base_report.c1_bound) {
    std::ostringstream os;
    os << "flow rate c1 = " << c1 << " must lie in (0, m1/(m1-1)] = (0, " << base_report.c1_bound << "]";
    throw ValidationError("flow_rate_out_of_range", os.str());
  }
}

// Value r * prod (phi/r)(y) of a configuration; 0 if any atom is still in D.
double scaled_product(const Model& model, const BoundaryData& phi, double r, const Configuration& cfg) {
  if (cfg.annihilated) return 0.0;
  double prod = r;
  for (const auto& a : cfg.atoms) {
    if (a.status == AtomStatus::Alive) return 0.0;
    prod *= phi.boundary_value(model.domain, a.position) / r;
  }
  return prod;
}

}  // namespace

std::string GuardReport::describe() const {
  std::ostringstream os;
  os.precision(6);
  os << (exact ? "exact" : "pilot") << " epsilon=" << epsilon << " se=" << std_error
     << " threshold=" << threshold << (passed() ? " pass" : " FAIL");
  if (!exact) os << " worst=" << worst_point.to_string();
  return os.str();
}

double flow_entry_bound(const Model& model) {
  const Flow* flow = model.flow();
  if (flow == nullptr) throw std::invalid_argument("entry bound needs a flow motion");
  if (auto m = entry_time_bound(*flow, model.domain)) return std::min(*m, model.flow_cap_M);
  return model.flow_cap_M;
}

EstimatorResult exp_exit_pilot(const Model& model, const Point& x, std::size_t n, const RunOptions& run) {
  const BrownianMotion bm{model.caps.h};
  return run_realizations(model, n, run, [&](BranchingSimulator&, RandomStream& rng, double& value) {
    const ExitRecord rec = brownian_path_to_exit(bm, model.domain, model.rate, x, rng, model.caps);
    value = std::exp(-rec.path_integral_c);
    return rec.truncated;
  });
}

GuardReport nagasawa_guard(const Model& model, const std::vector<Point>& probes, const GuardOptions& opt,
                           const RunOptions& run) {
  GuardReport g;
  g.threshold = opt.threshold;
  if (model.flow() != nullptr) {
    g.exact = true;
    g.epsilon = std::exp(-flow_entry_bound(model) * model.rate.c_max());
    return g;
  }
  std::vector<Point> points = probes;
  points.push_back(model.domain.kind() == DomainKind::Ball
                       ? model.domain.center()
                       : 0.5 * (model.domain.lo() + model.domain.hi()));
  bool first = true;
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (!model.domain.contains(points[j])) continue;
    RunOptions pilot = run;
    pilot.tag = substream_key(kGuardTag, j);
    const EstimatorResult e = exp_exit_pilot(model, points[j], opt.pilot_n, pilot);
    if (first || e.mean - 3.0 * e.std_error < g.epsilon - 3.0 * g.std_error) {
      g.epsilon = e.mean;
      g.std_error = e.std_error;
      g.worst_point = points[j];
      first = false;
    }
  }
  if (first) g.epsilon = 1.0;  // every probe on dD: tau = 0
  return g;
}

EstimatorResult estimate_functional(const Model& model, const Configuration& init,
                                    const std::function<double(const Point&)>& f, double t,
                                    std::size_t n, const RunOptions& run) {
  return run_realizations(model, n, run, [&](BranchingSimulator& sim, RandomStream& rng, double& value) {
    thread_local Configuration out;
    sim.evolve(init, t, rng, out);
    if (out.truncated) return true;
    value = product_functional(f, out);
    return false;
  });
}

EstimatorResult estimate_Ht(const Model& model, const Point& x, const std::function<double(const Point&)>& f,
                            double t, std::size_t n, const RunOptions& run) {
  const Configuration init = Configuration::delta(model.domain, x);
  if (t == 0.0) {
    EstimatorResult res;
    res.mean = product_functional(f, init);
    res.n_effective = res.n_total = n;
    return res;
  }
  return estimate_functional(model, init, f, t, n, run);
}

SolveReport estimate_u(const Model& model, const Point& x, const BoundaryData& phi, double r, std::size_t n,
                       const RunOptions& run, const GuardOptions& guard) {
  SolveReport rep;
  const ScaledMechanism mech(model.law, r);
  rep.validity = mech.report();
  const bool is_flow = model.flow() != nullptr;
  check_range(phi, r, is_flow);
  if (is_flow) check_flow_rate(model, validate(model.law, 1.0));
  const Configuration init = Configuration::delta(model.domain, x);

  Model scaled = model;
  scaled.law = mech.law();
  if (guard.enabled) {
    rep.guard = nagasawa_guard(scaled, {x}, guard, run);
    if (!rep.guard.passed()) throw ValidationError("nagasawa_guard_failed", rep.guard.describe());
  }
  const double inf = std::numeric_limits<double>::infinity();
  rep.result = run_realizations(scaled, n, run, [&](BranchingSimulator& sim, RandomStream& rng, double& value) {
    thread_local Configuration out;
    sim.evolve(init, inf, rng, out);
    if (out.truncated) return true;
    value = scaled_product(scaled, phi, r, out);
    return false;
  });
  return rep;
}

SolveReport estimate_u_flow_pure(const Model& model, const Point& x, const BoundaryData& phi, double r,
                                 std::size_t n, ClockMode mode, const RunOptions& run) {
  const Flow* flow = model.flow();
  if (flow == nullptr) throw std::invalid_argument("flow representation needs a flow motion");
  SolveReport rep;
  const ScaledMechanism mech(model.law, r);
  rep.validity = mech.report();
  check_range(phi, r, true);
  check_flow_rate(model, validate(model.law, 1.0));
  const double M = flow_entry_bound(model);

  if (!model.kernel.is_local()) {
    // The representation needs B_k to commute with the flow; require an
    // exactly vanishing residual at probes near the outflow boundary.
    auto f = [&](const Point& y) { return 0.5 + 0.5 * std::cos(3.0 * y[0] + 1.0); };
    for (double frac : {0.25, 0.5, 0.9}) {
      for (int k : {1, 2}) {
        const CommutationResidual res = check_commutation(model.kernel, *flow, model.domain, frac * M, x, f, k,
                                                          256, substream_key(kCommutationTag, run.seed),
                                                          model.flow_cap_M);
        if (res.residual != 0.0) {
          std::ostringstream os;
          os << "kernel " << model.kernel.describe() << " does not commute with the flow: residual "
             << res.residual << " (se " << res.std_error << ") at t=" << frac * M << ", k=" << k;
          throw ValidationError("commutation_violated", os.str());
        }
      }
    }
  }

  Model scaled = model;
  scaled.law = mech.law();
  rep.guard.exact = true;
  rep.guard.epsilon = std::exp(-M * model.rate.c_max());
  const double t = flow_pure_horizon(M);
  const Configuration init = Configuration::delta(model.domain, x);
  rep.result = run_realizations(scaled, n, run, [&](BranchingSimulator& sim, RandomStream& rng, double& value) {
    thread_local Configuration out;
    sim.evolve_pure(init, t, mode, rng, out);
    if (out.truncated) return true;
    value = scaled_product(scaled, phi, r, compose_flow(out, *flow, scaled.domain, t, scaled.flow_cap_M));
    return false;
  });
  return rep;
}

EstimatorResult exit_kernel_mc(const Model& model, const Point& x, const std::function<double(const Point&)>& f,
                               std::size_t n, const RunOptions& run) {
  if (!model.domain.in_closure(x)) throw OutsideClosureError("exit kernel start " + x.to_string() + " lies outside E");
  if (const Flow* flow = model.flow()) {
    const ExitRecord rec = flow_path_to_exit(*flow, model.domain, model.rate, x, model.flow_cap_M, model.caps.h);
    EstimatorResult res;
    res.mean = std::exp(-rec.path_integral_c) * f(rec.exit_point);
    res.n_effective = res.n_total = n;
    return res;
  }
  const BrownianMotion bm{model.caps.h};
  return run_realizations(model, n, run, [&](BranchingSimulator&, RandomStream& rng, double& value) {
    const ExitRecord rec = brownian_path_to_exit(bm, model.domain, model.rate, x, rng, model.caps);
    value = std::exp(-rec.path_integral_c) * f(rec.exit_point);
    return rec.truncated;
  });
}

}  // namespace nlbranch
