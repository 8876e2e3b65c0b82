#include "nlbranch/mechanism.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nlbranch/errors.hpp"
#include "nlbranch/stats.hpp"

namespace nlbranch {
namespace {

// Rounding slack when comparing a sum of weights against 1.
constexpr double kSumSlack = 1e-12;

}  // namespace

OffspringLaw::OffspringLaw(std::vector<double> b) : b_(std::move(b)) {
  while (!b_.empty() && b_.back() == 0.0) b_.pop_back();
  cdf_.resize(b_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < b_.size(); ++i) {
    acc += b_[i];
    cdf_[i] = acc;
  }
  total_ = acc;
}

OffspringLaw OffspringLaw::from_weights(const std::vector<std::pair<int, double>>& weights) {
  int kmax = 0;
  for (const auto& [k, w] : weights) {
    if (k < 1) throw std::invalid_argument("offspring count k must be >= 1");
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("offspring weight must be >= 0");
    kmax = std::max(kmax, k);
  }
  std::vector<double> b(static_cast<std::size_t>(kmax), 0.0);
  for (const auto& [k, w] : weights) b[k - 1] += w;
  OffspringLaw law(std::move(b));
  if (law.total() > 1.0 + kSumSlack) {
    throw ValidationError("offspring_condition_violated",
                          "offspring weights sum to " + std::to_string(law.total()) + " > 1");
  }
  return law;
}

OffspringLaw OffspringLaw::geometric(double beta, double rho, int k_max) {
  if (k_max < 1 || !(beta >= 0.0) || !(rho >= 0.0)) {
    throw std::invalid_argument("geometric law needs beta, rho >= 0 and k_max >= 1");
  }
  std::vector<std::pair<int, double>> w;
  double term = beta;
  for (int k = 1; k <= k_max; ++k) {
    w.emplace_back(k, term);
    term *= rho;
  }
  return from_weights(w);
}

double OffspringLaw::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < b_.size(); ++i) m += static_cast<double>(i + 1) * b_[i];
  return m;
}

std::string OffspringLaw::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << '{';
  bool first = true;
  for (std::size_t i = 0; i < b_.size(); ++i) {
    if (b_[i] == 0.0) continue;
    if (!first) os << ", ";
    os << (i + 1) << ':' << b_[i];
    first = false;
  }
  os << '}';
  return os.str();
}

ValidityReport validate(const OffspringLaw& law, double r) {
  if (!(r >= 1.0) || !std::isfinite(r)) throw std::invalid_argument("scaling r must be finite and >= 1");
  ValidityReport rep;
  rep.r = r;
  double rk = 1.0;  // r^(k-1)
  for (int k = 1; k <= law.max_k(); ++k) {
    const double w = law.weight(k) * rk;
    rep.scaled_sum += w;
    rep.scaled_moment += static_cast<double>(k) * w;
    rep.m1 += static_cast<double>(k) * law.weight(k);
    rk *= r;
  }
  rep.sum_ok = rep.scaled_sum <= 1.0 + kSumSlack;
  rep.moment_ok = std::isfinite(rep.scaled_moment);
  rep.c1_bound = rep.m1 > 1.0 ? rep.m1 / (rep.m1 - 1.0) : std::numeric_limits<double>::infinity();
  return rep;
}

ScaledMechanism::ScaledMechanism(const OffspringLaw& base, double r)
    : base_(base), scaled_(base), r_(r), report_(validate(base, r)) {
  if (!report_.ok()) {
    std::ostringstream os;
    os << "offspring condition violated at r = " << r << ": sum r^(k-1) b_k = " << report_.scaled_sum;
    throw ValidationError("offspring_condition_violated", os.str());
  }
  if (r != 1.0) {
    std::vector<double> b(base.weights().begin(), base.weights().end());
    double rk = 1.0;
    for (double& w : b) {
      w *= rk;
      rk *= r;
    }
    scaled_ = OffspringLaw(std::move(b));
  }
}

PlacementKernel PlacementKernel::gaussian_jitter(double sigma, int max_rejections) {
  if (!(sigma > 0.0) || max_rejections < 0) throw std::invalid_argument("gaussian jitter needs sigma > 0");
  return PlacementKernel(GaussianJitter{sigma, max_rejections});
}

PlacementKernel PlacementKernel::uniform_ball(double rho, int max_rejections) {
  if (!(rho > 0.0) || max_rejections < 0) throw std::invalid_argument("uniform ball needs rho > 0");
  return PlacementKernel(UniformBall{rho, max_rejections});
}

Point PlacementKernel::sample_point(const Domain& dom, const Point& x, RandomStream& rng,
                                    std::uint64_t& clamps) const {
  if (is_local()) return x;
  auto propose = [&]() {
    Point y = x;
    if (const auto* g = std::get_if<GaussianJitter>(&v_)) {
      for (std::size_t i = 0; i < y.dim(); ++i) y[i] += g->sigma * rng.normal();
    } else {
      const auto& u = std::get<UniformBall>(v_);
      // Uniform in the ball: Gaussian direction, radius rho * U^(1/d).
      Point dir(y.dim());
      double nrm = 0.0;
      do {
        for (std::size_t i = 0; i < dir.dim(); ++i) dir[i] = rng.normal();
        nrm = norm(dir);
      } while (nrm == 0.0);
      const double radius = u.rho * std::pow(rng.uniform(), 1.0 / static_cast<double>(y.dim()));
      y += (radius / nrm) * dir;
    }
    return y;
  };
  const int budget = std::visit(
      [](const auto& v) -> int {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Local>) {
          return 0;
        } else {
          return v.max_rejections;
        }
      },
      v_);
  Point y = propose();
  for (int attempt = 0; attempt < budget && !dom.in_closure(y); ++attempt) y = propose();
  if (!dom.in_closure(y)) {
    ++clamps;
    y = dom.project_to_boundary(y);
  }
  return y;
}

std::string PlacementKernel::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Local>) os << "Local";
        if constexpr (std::is_same_v<T, GaussianJitter>) os << "GaussianJitter(" << v.sigma << ")";
        if constexpr (std::is_same_v<T, UniformBall>) os << "UniformBall(" << v.rho << ")";
      },
      v_);
  return os.str();
}

BranchOutcome sample_offspring(const OffspringLaw& law, const PlacementKernel& kernel,
                               const Domain& dom, const Point& x, RandomStream& rng) {
  BranchOutcome out;
  const int k = law.sample(rng);
  if (k == 0) {
    out.annihilated = true;
    return out;
  }
  out.offspring.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out.offspring.push_back(kernel.sample_point(dom, x, rng, out.clamps));
  return out;
}

CommutationResidual check_commutation(const PlacementKernel& kernel, const Flow& flow,
                                      const Domain& dom, double t, const Point& x,
                                      const std::function<double(const Point&)>& f, int k,
                                      std::size_t n_samples, std::uint64_t seed, double cap_M) {
  if (k < 1) throw std::invalid_argument("commutation check needs k >= 1");
  if (n_samples == 0) throw std::invalid_argument("commutation check needs samples");
  const Point moved = flow_step(flow, dom, x, t, cap_M);
  std::vector<double> lhs(n_samples), rhs(n_samples), diff(n_samples), scratch(n_samples);
  std::uint64_t clamps = 0;
  for (std::size_t j = 0; j < n_samples; ++j) {
    double left = 1.0, right = 1.0;
    RandomStream a(seed, j), b(seed, j);
    for (int i = 0; i < k; ++i) {
      left *= f(flow_step(flow, dom, kernel.sample_point(dom, x, a, clamps), t, cap_M));
      right *= f(kernel.sample_point(dom, moved, b, clamps));
    }
    lhs[j] = left;
    rhs[j] = right;
    diff[j] = left - right;
  }
  CommutationResidual res;
  const SampleMoments d = sample_moments(diff, scratch);
  res.residual = std::abs(d.mean);
  res.std_error = d.stddev / std::sqrt(static_cast<double>(n_samples));
  res.lhs = pairwise_sum(lhs) / static_cast<double>(n_samples);
  res.rhs = pairwise_sum(rhs) / static_cast<double>(n_samples);
  return res;
}

}  // namespace nlbranch
