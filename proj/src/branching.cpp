#include "nlbranch/branching.hpp"

#include <cmath>
#include <limits>

#include "nlbranch/errors.hpp"

namespace nlbranch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Configuration Configuration::delta(const Domain& dom, const Point& x) { return of(dom, {x}); }

Configuration Configuration::of(const Domain& dom, const std::vector<Point>& points) {
  Configuration c;
  for (const auto& p : points) {
    if (dom.contains(p)) {
      c.atoms.push_back({p, AtomStatus::Alive});
    } else if (dom.on_boundary(p)) {
      c.atoms.push_back({p, AtomStatus::Stopped});
    } else {
      throw OutsideClosureError("atom " + p.to_string() + " lies outside E");
    }
  }
  return c;
}

std::size_t Configuration::alive_count() const {
  std::size_t n = 0;
  for (const auto& a : atoms) n += a.status == AtomStatus::Alive;
  return n;
}

bool BranchingSimulator::branch(const Point& x, double time, RandomStream& rng, Configuration& out) {
  ++diag_.branch_events;
  const int k = model_.law.sample(rng);
  if (k == 0) {
    out.annihilated = true;
    halted_ = true;
    return false;
  }
  population_ += static_cast<std::size_t>(k) - 1;
  if (population_ > model_.caps.population_cap) {
    out.truncated = true;
    halted_ = true;
    return false;
  }
  const Domain& dom = model_.domain;
  for (int i = 0; i < k; ++i) {
    const Point y = model_.kernel.sample_point(dom, x, rng, diag_.clamps);
    if (dom.contains(y)) {
      stack_.push_back({y, time, 0.0, rng.exponential()});
    } else {
      out.atoms.push_back({y, AtomStatus::Stopped});
    }
  }
  return true;
}

void BranchingSimulator::run_brownian(Pending p, double horizon, RandomStream& rng,
                                      Configuration& out) {
  const Domain& dom = model_.domain;
  const double h = model_.caps.h;
  for (;;) {
    if (p.time >= horizon) {
      settle_alive(p, horizon, out);
      return;
    }
    const double dt = std::min(h, horizon - p.time);
    const double c = model_.rate.in_D(p.x);
    if (c > 0.0 && p.integral + c * dt >= p.threshold) {
      p.time += (p.threshold - p.integral) / c;
      branch(p.x, p.time, rng, out);
      return;
    }
    p.integral += c * dt;
    const BrownianStep step = brownian_step(dom, p.x, dt, rng);
    p.time += dt;
    p.x = step.next;
    if (step.exited) {
      latest_ = std::max(latest_, p.time);
      out.atoms.push_back({p.x, AtomStatus::Stopped});
      return;
    }
  }
}

void BranchingSimulator::run_flow(const Flow& flow, Pending p, double horizon, RandomStream& rng,
                                  Configuration& out) {
  const Domain& dom = model_.domain;
  const ExitRecord exit = flow_entry_time(flow, dom, p.x, model_.flow_cap_M);
  double tau_left = exit.exit_time;
  // A constant rate along the path admits exact branch times in one event.
  const double h = model_.rate.is_constant() ? kInf : model_.caps.h;
  for (;;) {
    if (p.time >= horizon) {
      settle_alive(p, horizon, out);
      return;
    }
    const double dt = std::min({h, horizon - p.time, tau_left});
    const double c = model_.rate.in_D(p.x);
    if (c > 0.0 && p.integral + c * dt >= p.threshold) {
      const double tb = (p.threshold - p.integral) / c;
      if (tb < tau_left) {
        const Point y = flow.advance(p.x, tb);
        p.time += tb;
        if (dom.contains(y)) {
          branch(y, p.time, rng, out);
        } else {
          out.atoms.push_back({dom.project_to_boundary(y), AtomStatus::Stopped});
        }
        return;
      }
    }
    p.integral += c * dt;
    p.time += dt;
    if (dt >= tau_left) {
      latest_ = std::max(latest_, p.time);
      out.atoms.push_back({exit.exit_point, AtomStatus::Stopped});
      return;
    }
    p.x = flow.advance(p.x, dt);
    tau_left -= dt;
  }
}

void BranchingSimulator::run_pure(Pending p, double horizon, ClockMode mode, RandomStream& rng,
                                  Configuration& out) {
  const Domain& dom = model_.domain;
  if (!dom.contains(p.x)) {
    out.atoms.push_back({p.x, AtomStatus::Stopped});
    return;
  }
  double end = horizon;
  const Flow* flow = model_.flow();
  if (mode == ClockMode::FlowModulated) {
    if (flow == nullptr) throw std::invalid_argument("flow-modulated clock needs a flow motion");
    // Phi_s(z) stays in D exactly for s < tau(z).
    end = std::min(end, flow_entry_time(*flow, dom, p.x, model_.flow_cap_M).exit_time);
  }
  if (mode == ClockMode::FrozenRate || model_.rate.is_constant()) {
    const double c = model_.rate.in_D(p.x);
    if (c > 0.0) {
      const double tb = p.time + (p.threshold - p.integral) / c;
      if (tb < end) {
        branch(p.x, tb, rng, out);
        return;
      }
    }
    out.atoms.push_back({p.x, AtomStatus::Alive});
    return;
  }
  // Flow-modulated with a varying rate: integrate c along Phi_s(z).
  Point y = flow->advance(p.x, p.time);
  const double h = model_.caps.h;
  while (p.time < end) {
    const double dt = std::min(h, end - p.time);
    const double c = model_.rate(dom, y);
    if (c > 0.0 && p.integral + c * dt >= p.threshold) {
      branch(p.x, p.time + (p.threshold - p.integral) / c, rng, out);
      return;
    }
    p.integral += c * dt;
    p.time += dt;
    y = flow->advance(y, dt);
  }
  out.atoms.push_back({p.x, AtomStatus::Alive});
}

void BranchingSimulator::evolve(const Configuration& init, double t, RandomStream& rng,
                                Configuration& out) {
  out.clear();
  stack_.clear();
  halted_ = false;
  latest_ = 0.0;
  if (init.annihilated) {
    out.annihilated = true;
    return;
  }
  if (!(t >= 0.0)) throw std::invalid_argument("evolution time must be >= 0");
  requested_ = t;
  const double horizon = std::min(t, model_.caps.time_cap);
  population_ = init.atoms.size();
  for (auto it = init.atoms.rbegin(); it != init.atoms.rend(); ++it) {
    if (it->status == AtomStatus::Stopped) {
      out.atoms.push_back(*it);
    } else {
      stack_.push_back({it->position, 0.0, 0.0, rng.exponential()});
    }
  }
  const Flow* flow = model_.flow();
  while (!stack_.empty() && !halted_) {
    Pending p = stack_.back();
    stack_.pop_back();
    if (flow != nullptr) {
      run_flow(*flow, p, horizon, rng, out);
    } else {
      run_brownian(p, horizon, rng, out);
    }
  }
  out.clock = init.clock + (std::isfinite(t) ? horizon : latest_);
}

void BranchingSimulator::settle_alive(const Pending& p, double horizon, Configuration& out) {
  if (horizon < requested_) {
    // Time cap reached before the requested horizon.
    out.truncated = true;
    halted_ = true;
    latest_ = horizon;
    return;
  }
  out.atoms.push_back({p.x, AtomStatus::Alive});
}

void BranchingSimulator::evolve_pure(const Configuration& init, double t, ClockMode mode,
                                     RandomStream& rng, Configuration& out) {
  out.clear();
  stack_.clear();
  halted_ = false;
  if (init.annihilated) {
    out.annihilated = true;
    return;
  }
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("pure evolution needs finite t >= 0");
  population_ = init.atoms.size();
  for (auto it = init.atoms.rbegin(); it != init.atoms.rend(); ++it) {
    stack_.push_back({it->position, 0.0, 0.0, rng.exponential()});
  }
  while (!stack_.empty() && !halted_) {
    Pending p = stack_.back();
    stack_.pop_back();
    run_pure(p, t, mode, rng, out);
  }
  out.clock = init.clock + t;
}

Configuration evolve(const Configuration& init, double t, const Model& model, RandomStream& rng) {
  BranchingSimulator sim(model);
  Configuration out;
  sim.evolve(init, t, rng, out);
  return out;
}

Configuration evolve_pure(const Configuration& init, double t, const Model& model, ClockMode mode,
                          RandomStream& rng) {
  BranchingSimulator sim(model);
  Configuration out;
  sim.evolve_pure(init, t, mode, rng, out);
  return out;
}

Configuration compose_flow(const Configuration& mu, const Flow& flow, const Domain& dom, double t,
                           double cap_M) {
  Configuration out = mu;
  for (auto& a : out.atoms) {
    a.position = flow_step(flow, dom, a.position, t, cap_M);
    a.status = dom.on_boundary(a.position) ? AtomStatus::Stopped : AtomStatus::Alive;
  }
  return out;
}

double product_functional(const std::function<double(const Point&)>& f, const Configuration& mu) {
  if (mu.annihilated) return 0.0;
  double prod = 1.0;
  for (const auto& a : mu.atoms) {
    const double v = f(a.position);
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::domain_error("product functional needs 0 <= f <= 1, got " + std::to_string(v) +
                              " at " + a.position.to_string());
    }
    prod *= v;
  }
  return prod;
}

}  // namespace nlbranch
