#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <variant>
#include <vector>

#include "nlbranch/domain.hpp"
#include "nlbranch/killing.hpp"
#include "nlbranch/mechanism.hpp"
#include "nlbranch/motion.hpp"
#include "nlbranch/rng.hpp"

namespace nlbranch {

enum class AtomStatus : std::uint8_t { Alive, Stopped };

struct Atom {
  Point position;
  AtomStatus status;
};

/// A finite configuration of particles in E (an element of the symmetric
/// powers of E). Atom order carries no meaning. `annihilated` marks the
/// cemetery state; `truncated` marks a run cut off by a cap.
struct Configuration {
  std::vector<Atom> atoms;
  bool annihilated = false;
  bool truncated = false;
  double clock = 0.0;

  static Configuration zero() { return {}; }
  /// delta_x, with status derived from the position.
  static Configuration delta(const Domain& dom, const Point& x);
  static Configuration of(const Domain& dom, const std::vector<Point>& points);

  bool is_zero() const { return atoms.empty() && !annihilated; }
  std::size_t alive_count() const;
  void clear() {
    atoms.clear();
    annihilated = false;
    truncated = false;
    clock = 0.0;
  }
};

using Motion = std::variant<BrownianMotion, Flow>;

enum class ClockMode {
  /// A frozen atom at z branches at rate c(z) for all time.
  FrozenRate,
  /// A frozen atom at z branches at rate c(Phi_s(z)) at global time s.
  FlowModulated,
};

/// Everything needed to simulate the branching process on E.
struct Model {
  Domain domain;
  Motion motion;
  KillingRate rate;
  OffspringLaw law;  // already r-scaled when an r != 1 solve is run
  PlacementKernel kernel;
  Caps caps;
  double flow_cap_M = 1.0e3;  // bound M on entry times of a flow motion

  const Flow* flow() const { return std::get_if<Flow>(&motion); }
};

struct SimDiagnostics {
  std::uint64_t branch_events = 0;
  std::uint64_t clamps = 0;
};

/// Event-driven simulator with reusable buffers; one instance per thread.
///
/// Each alive atom carries its own clock, its killing integral and a unit
/// exponential threshold; it branches when the integral reaches the
/// threshold. Atoms are processed depth-first, which is legitimate because
/// distinct atoms evolve independently, and keeps the order of random draws
/// a function of the stream alone.
class BranchingSimulator {
 public:
  explicit BranchingSimulator(const Model& model) : model_(model) { model.caps.validate(); }

  /// Evolves `init` for time t. t = +inf runs until every atom is stopped;
  /// either way the time cap applies and flags the result truncated.
  void evolve(const Configuration& init, double t, RandomStream& rng, Configuration& out);

  /// Pure branching: atoms never move, and branch with the given clock.
  void evolve_pure(const Configuration& init, double t, ClockMode mode, RandomStream& rng,
                   Configuration& out);

  const SimDiagnostics& diagnostics() const { return diag_; }

 private:
  struct Pending {
    Point x;
    double time;
    double integral;
    double threshold;
  };

  bool branch(const Point& x, double time, RandomStream& rng, Configuration& out);
  void settle_alive(const Pending& p, double horizon, Configuration& out);
  void run_brownian(Pending p, double horizon, RandomStream& rng, Configuration& out);
  void run_flow(const Flow& flow, Pending p, double horizon, RandomStream& rng, Configuration& out);
  void run_pure(Pending p, double horizon, ClockMode mode, RandomStream& rng, Configuration& out);

  const Model& model_;
  std::vector<Pending> stack_;
  std::size_t population_ = 0;
  bool halted_ = false;
  double requested_ = 0.0;
  double latest_ = 0.0;
  SimDiagnostics diag_;
};

Configuration evolve(const Configuration& init, double t, const Model& model, RandomStream& rng);
Configuration evolve_pure(const Configuration& init, double t, const Model& model, ClockMode mode,
                          RandomStream& rng);

/// Replaces every atom x by Phi_t(x) and restamps statuses.
Configuration compose_flow(const Configuration& mu, const Flow& flow, const Domain& dom, double t,
                           double cap_M);

/// prod f(x_i) over atoms; 1 on the zero configuration, 0 if annihilated.
/// Throws std::domain_error if f leaves [0, 1] at an atom.
double product_functional(const std::function<double(const Point&)>& f, const Configuration& mu);

}  // namespace nlbranch
