#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nlbranch/domain.hpp"
#include "nlbranch/motion.hpp"
#include "nlbranch/rng.hpp"

namespace nlbranch {

/// Offspring probabilities (b_k)_{k>=1} with sum <= 1; the defect
/// q = 1 - sum b_k is the probability that a branching event annihilates.
class OffspringLaw {
 public:
  /// Pairs (k, b_k) with k >= 1 and b_k >= 0; repeated k accumulate.
  static OffspringLaw from_weights(const std::vector<std::pair<int, double>>& weights);
  /// b_k = beta * rho^(k-1) for k = 1..k_max.
  static OffspringLaw geometric(double beta, double rho, int k_max);

  int max_k() const { return static_cast<int>(b_.size()); }
  double weight(int k) const { return k >= 1 && k <= max_k() ? b_[k - 1] : 0.0; }
  std::span<const double> weights() const { return b_; }

  double total() const { return total_; }
  double defect() const { return 1.0 - total_; }
  /// m1 = sum k b_k.
  double mean() const;

  /// Number of offspring, or 0 for annihilation.
  int sample(RandomStream& rng) const {
    const double u = rng.uniform();
    for (std::size_t i = 0; i < cdf_.size(); ++i) {
      if (u < cdf_[i]) return static_cast<int>(i) + 1;
    }
    return 0;
  }

  std::string describe() const;

 private:
  explicit OffspringLaw(std::vector<double> b);
  friend class ScaledMechanism;

  std::vector<double> b_;
  std::vector<double> cdf_;
  double total_ = 0.0;
};

/// Admissibility of a law under the scaling b_{k,r} = r^(k-1) b_k.
struct ValidityReport {
  double r = 1.0;
  double scaled_sum = 0.0;     // sum r^(k-1) b_k
  double scaled_moment = 0.0;  // sum k r^(k-1) b_k
  double m1 = 0.0;             // sum k b_k
  bool sum_ok = false;         // scaled_sum <= 1
  bool moment_ok = false;      // scaled_moment finite
  /// Upper bound m1 / (m1 - 1) on a constant rate for the flow case;
  /// +inf when m1 <= 1.
  double c1_bound = 0.0;

  bool ok() const { return sum_ok && moment_ok; }
};

ValidityReport validate(const OffspringLaw& law, double r);

/// The law with weights b_{k,r} = r^(k-1) b_k. Construction fails with a
/// ValidationError when the scaled law violates the offspring conditions.
class ScaledMechanism {
 public:
  ScaledMechanism(const OffspringLaw& base, double r);

  const OffspringLaw& base() const { return base_; }
  const OffspringLaw& law() const { return scaled_; }
  double r() const { return r_; }
  const ValidityReport& report() const { return report_; }

 private:
  OffspringLaw base_;
  OffspringLaw scaled_;
  double r_;
  ValidityReport report_;
};

/// Markov kernel B_k placing k offspring of a particle killed at x. Offspring
/// positions are i.i.d. given x, so sampled k-tuples are exchangeable.
class PlacementKernel {
 public:
  struct Local {};
  struct GaussianJitter {
    double sigma;
    int max_rejections = 64;
  };
  struct UniformBall {
    double rho;
    int max_rejections = 64;
  };
  using Variant = std::variant<Local, GaussianJitter, UniformBall>;

  static PlacementKernel local() { return PlacementKernel(Local{}); }
  static PlacementKernel gaussian_jitter(double sigma, int max_rejections = 64);
  static PlacementKernel uniform_ball(double rho, int max_rejections = 64);

  bool is_local() const { return std::holds_alternative<Local>(v_); }
  const Variant& variant() const { return v_; }

  /// One offspring position in E. Proposals outside E are redrawn up to
  /// max_rejections times, after which the last proposal is projected onto
  /// dD and `clamps` is incremented.
  Point sample_point(const Domain& dom, const Point& x, RandomStream& rng, std::uint64_t& clamps) const;

  std::string describe() const;

 private:
  explicit PlacementKernel(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

struct BranchOutcome {
  bool annihilated = false;
  std::vector<Point> offspring;  // empty iff annihilated
  std::uint64_t clamps = 0;
};

/// Draws a branching event at x in D: k offspring with probability b_k,
/// annihilation with probability q.
BranchOutcome sample_offspring(const OffspringLaw& law, const PlacementKernel& kernel,
                               const Domain& dom, const Point& x, RandomStream& rng);

struct CommutationResidual {
  double residual = 0.0;  // |B_k(f o Phi_t)^(k)(x) - B_k f^(k)(Phi_t(x))|
  double std_error = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Monte Carlo check of B_k(f o Phi_t)^(k) = (B_k f^(k)) o Phi_t at x.
/// Both sides reuse the same random numbers per sample, so the residual is
/// exactly zero for the local kernel and for t = 0.
CommutationResidual check_commutation(const PlacementKernel& kernel, const Flow& flow,
                                      const Domain& dom, double t, const Point& x,
                                      const std::function<double(const Point&)>& f, int k,
                                      std::size_t n_samples, std::uint64_t seed, double cap_M);

}  // namespace nlbranch
