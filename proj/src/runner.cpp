#include "nlbranch/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "nlbranch/controlled.hpp"
#include "nlbranch/errors.hpp"
#include "nlbranch/estimator.hpp"
#include "nlbranch/oracle.hpp"

namespace nlbranch {
namespace {

using nlohmann::json;

Point point_from(const std::vector<double>& v, const std::string& what) {
  if (v.empty()) throw ConfigError(what + " is required");
  return Point::from(v);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& p : split(s, ',')) {
    char* end = nullptr;
    const double v = std::strtod(p.c_str(), &end);
    if (p.empty() || end != p.c_str() + p.size()) throw ConfigError("not a number: '" + p + "'");
    out.push_back(v);
  }
  return out;
}

Flow build_flow(const Config& cfg, const std::string& kind, std::size_t dim) {
  if (kind == "translation") {
    const Point v = point_from(cfg.get_list("motion.direction"), "motion.direction");
    if (v.dim() != dim) throw ConfigError("motion.direction has the wrong dimension");
    return Flow::translation(v);
  }
  if (kind == "product") {
    const auto v = cfg.get_list("motion.direction");
    if (v.size() != dim) throw ConfigError("motion.direction needs one speed per coordinate");
    std::vector<Flow> factors;
    for (double s : v) factors.push_back(Flow::translation(Point{s}));
    return Flow::product(std::move(factors));
  }
  if (kind == "vectorfield") {
    const auto A = cfg.get_list("motion.field");
    auto b = cfg.get_list("motion.offset");
    if (A.size() != dim * dim) throw ConfigError("motion.field needs dim*dim entries");
    if (b.empty()) b.assign(dim, 0.0);
    if (b.size() != dim) throw ConfigError("motion.offset needs dim entries");
    auto field = [A, b, dim](const Point& x) {
      Point y(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        double acc = b[i];
        for (std::size_t j = 0; j < dim; ++j) acc += A[i * dim + j] * x[j];
        y[i] = acc;
      }
      return y;
    };
    return Flow::vector_field(field, dim, cfg.get_double("motion.h"), "affine");
  }
  throw ConfigError("unknown motion.kind '" + kind + "'");
}

OffspringLaw build_law(const Config& cfg) {
  if (cfg.has("mech.b_geometric")) {
    const auto g = cfg.get_list("mech.b_geometric");
    if (g.size() != 3) throw ConfigError("mech.b_geometric needs beta,rho,k_max");
    return OffspringLaw::geometric(g[0], g[1], static_cast<int>(g[2]));
  }
  std::vector<std::pair<int, double>> w;
  if (cfg.has("mech.b")) {
    for (const auto& item : split(cfg.get("mech.b"), ',')) {
      const auto kv = split(item, ':');
      if (kv.size() != 2) throw ConfigError("mech.b entries must be k:weight");
      w.emplace_back(std::stoi(kv[0]), parse_list(kv[1]).at(0));
    }
  }
  return OffspringLaw::from_weights(w);
}

KillingRate build_rate(const Config& cfg) {
  if (cfg.has("mech.c_table")) {
    std::vector<double> breaks, values;
    bool first = true;
    for (const auto& item : split(cfg.get("mech.c_table"), ',')) {
      const auto kv = split(item, ':');
      if (kv.size() != 2) throw ConfigError("mech.c_table entries must be from:value");
      if (!first) breaks.push_back(parse_list(kv[0]).at(0));
      values.push_back(parse_list(kv[1]).at(0));
      first = false;
    }
    return KillingRate::piecewise(breaks, values);
  }
  return KillingRate::constant_on_D(cfg.get_double("mech.c1"));
}

PlacementKernel build_kernel(const Config& cfg) {
  const std::string k = cfg.get("mech.kernel");
  const int budget = static_cast<int>(cfg.get_int("mech.max_rejections"));
  if (k == "local") return PlacementKernel::local();
  const auto parts = split(k, ':');
  if (parts.size() == 2 && parts[0] == "jitter") return PlacementKernel::gaussian_jitter(parse_list(parts[1]).at(0), budget);
  if (parts.size() == 2 && parts[0] == "ball") return PlacementKernel::uniform_ball(parse_list(parts[1]).at(0), budget);
  throw ConfigError("unknown mech.kernel '" + k + "'");
}

std::string csv_header(std::size_t dim) {
  if (dim == 1) return "x";
  std::string h;
  for (std::size_t i = 0; i < dim; ++i) h += (i ? ",x" : "x") + std::to_string(i + 1);
  return h;
}

std::string coords(const Point& x) {
  std::string s;
  for (std::size_t i = 0; i < x.dim(); ++i) s += (i ? "," : "") + format_number(x[i]);
  return s;
}

json point_json(const Point& x) {
  json a = json::array();
  for (std::size_t i = 0; i < x.dim(); ++i) a.push_back(x[i]);
  return a;
}

json result_json(const EstimatorResult& r) {
  return {{"estimate", r.mean},
          {"stderr", r.std_error},
          {"n_effective", r.n_effective},
          {"truncated_fraction", r.truncated_fraction},
          {"clamps", r.clamps},
          {"branch_events", r.branch_events}};
}

json validity_json(const ValidityReport& v) {
  return {{"r", v.r},           {"scaled_sum", v.scaled_sum}, {"scaled_moment", v.scaled_moment},
          {"m1", v.m1},         {"sum_ok", v.sum_ok},         {"moment_ok", v.moment_ok},
          {"c1_bound", std::isfinite(v.c1_bound) ? json(v.c1_bound) : json("inf")}};
}

json guard_json(const GuardReport& g) {
  json j = {{"exact", g.exact},
            {"epsilon", g.epsilon},
            {"stderr", g.std_error},
            {"threshold", g.threshold},
            {"passed", g.passed()}};
  if (!g.exact && g.worst_point.dim() > 0) j["worst_point"] = point_json(g.worst_point);
  return j;
}

struct Probe {
  Point x;
  EstimatorResult r;
};

std::string estimates_csv(const std::vector<Probe>& probes, std::uint64_t seed) {
  std::ostringstream os;
  os << csv_header(probes.empty() ? 1 : probes.front().x.dim())
     << ",estimate,stderr,n_effective,truncated_fraction,seed\n";
  for (const auto& p : probes) {
    os << coords(p.x) << ',' << format_number(p.r.mean) << ',' << format_number(p.r.std_error) << ','
       << p.r.n_effective << ',' << format_number(p.r.truncated_fraction) << ',' << seed << '\n';
  }
  return os.str();
}

Grid1D oracle_grid(const Config& cfg, const Domain& dom) {
  if (dom.kind() != DomainKind::Interval) throw ValidationError("oracle_needs_interval", "grid oracles need an interval domain");
  Grid1D g;
  g.a = dom.lo()[0];
  g.b = dom.hi()[0];
  g.m = static_cast<std::size_t>(cfg.get_int("oracle.m"));
  g.dt = cfg.get_double("oracle.dt");
  return g;
}

std::pair<double, double> endpoint_values(const BoundaryData& phi, const Domain& dom) {
  return {phi.boundary_value(dom, dom.lo()), phi.boundary_value(dom, dom.hi())};
}

void require_local(const Model& m) {
  if (!m.kernel.is_local()) throw ValidationError("oracle_needs_local_kernel", "PDE oracles cover the local kernel only");
}

// Oracle value at each probe, for the comparison block of the summary.
std::function<double(const Point&)> comparison_oracle(const std::string& name, const Config& cfg, const Model& model,
                                                      const BoundaryData& phi) {
  const Domain& dom = model.domain;
  if (name == "harmonic") {
    if (dom.kind() != DomainKind::Interval) throw ValidationError("oracle_needs_interval", "harmonic closed form needs an interval");
    const auto [p0, p1] = endpoint_values(phi, dom);
    const double a = dom.lo()[0], b = dom.hi()[0];
    return [=](const Point& x) { return p0 + (p1 - p0) * (x[0] - a) / (b - a); };
  }
  if (name == "newton" || name == "picard") {
    require_local(model);
    const Grid1D g = oracle_grid(cfg, dom);
    GridFunction w;
    if (name == "newton") {
      const auto [p0, p1] = endpoint_values(phi, dom);
      w = newton_bvp_1d(p0, p1, model.rate, model.law, g).u;
    } else {
      const double t = cfg.get_double("ht.t");
      GridFunction f = sample_on_grid(g, [&](double x) { return phi.eval_on_E(dom, Point{x}); });
      w = picard_duhamel_1d(f, t, model.law, model.rate, g).w;
    }
    return [g, w](const Point& x) { return interpolate(g, w, x[0]); };
  }
  if (name == "flow_exact") {
    const Flow* flow = model.flow();
    if (flow == nullptr || !model.rate.is_constant()) {
      throw ValidationError("oracle_needs_flow", "flow_exact needs a flow motion and a constant rate");
    }
    const double c1 = model.rate.c_max();
    const double cap = model.flow_cap_M;
    return [=, &phi, &model](const Point& x) {
      return exit_kernel_flow_exact(*model.flow(), model.domain, c1,
                                    [&](const Point& y) { return phi.eval_on_E(model.domain, y); }, x, cap);
    };
  }
  if (name == "exp_exit") {
    if (dom.kind() != DomainKind::Interval || !model.rate.is_constant()) {
      throw ValidationError("oracle_needs_interval", "exp_exit needs an interval and a constant rate");
    }
    const double c = model.rate.c_max(), a = dom.lo()[0], b = dom.hi()[0];
    return [=](const Point& x) { return expected_exp_exit_interval(c, x[0], a, b); };
  }
  if (name == "poisson") {
    return [&phi, dom](const Point& x) { return poisson_disk(dom, phi, x); };
  }
  throw ConfigError("unknown compare.oracle '" + name + "'");
}

json compare_block(const std::vector<Probe>& probes, const std::function<double(const Point&)>& oracle, double slack) {
  json rows = json::array();
  bool all = true;
  for (const auto& p : probes) {
    const double o = oracle(p.x);
    const double diff = p.r.mean - o;
    const bool ok = std::abs(diff) <= 3.0 * p.r.std_error + slack;
    all = all && ok;
    rows.push_back({{"x", point_json(p.x)}, {"oracle", o}, {"diff", diff}, {"within_tolerance", ok}});
  }
  return {{"slack", slack}, {"rows", rows}, {"all_within_tolerance", all}};
}

double default_slack(const std::string& oracle) {
  if (oracle == "newton") return 2e-2;
  if (oracle == "picard" || oracle == "harmonic") return 1e-2;
  return 0.0;
}

RunOptions run_options(const Config& cfg, unsigned threads, std::uint64_t tag) {
  RunOptions r;
  r.seed = static_cast<std::uint64_t>(cfg.get_int("sim.seed"));
  r.threads = threads;
  r.tag = tag;
  return r;
}

ClockMode clock_mode(const Config& cfg) {
  const std::string m = cfg.get("sim.clock_mode");
  if (m == "frozen_rate") return ClockMode::FrozenRate;
  if (m == "flow_modulated") return ClockMode::FlowModulated;
  throw ConfigError("unknown sim.clock_mode '" + m + "'");
}

std::vector<Point> probes_of(const Config& cfg) {
  auto p = cfg.get_points("probes");
  if (p.empty()) throw ConfigError("no probe points");
  return p;
}

void run_estimates(const std::string& command, const Config& cfg, unsigned threads, RunOutput& out) {
  const Model model = build_model(cfg);
  const BoundaryData phi = build_phi(cfg, model.domain);
  const std::vector<Point> probes = probes_of(cfg);
  const auto n = static_cast<std::size_t>(cfg.get_int("sim.n_realizations"));
  const double r = cfg.get_double("mech.r");
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("sim.seed"));
  std::vector<Probe> rows;
  json& s = out.summary;

  GuardOptions guard;
  guard.enabled = false;  // run once below for all probes
  if (command == "solve" || command == "flowsolve") {
    const ScaledMechanism mech(model.law, r);
    s["validity"] = validity_json(mech.report());
    if (cfg.get_bool("guard.enabled")) {
      GuardOptions g;
      g.pilot_n = static_cast<std::size_t>(cfg.get_int("guard.pilot_n"));
      g.threshold = cfg.get_double("guard.threshold");
      const GuardReport rep = nagasawa_guard(model, probes, g, run_options(cfg, threads, 0));
      s["guard"] = guard_json(rep);
      if (!rep.passed()) throw ValidationError("nagasawa_guard_failed", rep.describe());
    }
  }

  for (std::size_t i = 0; i < probes.size(); ++i) {
    const Point& x = probes[i];
    const RunOptions ro = run_options(cfg, threads, i);
    EstimatorResult res;
    if (command == "solve") {
      res = estimate_u(model, x, phi, r, n, ro, guard).result;
    } else if (command == "flowsolve") {
      res = estimate_u_flow_pure(model, x, phi, r, n, clock_mode(cfg), ro).result;
    } else if (command == "ht") {
      if (!validate(model.law, 1.0).ok()) {
        throw ValidationError("offspring_condition_violated", "offspring weights sum above 1");
      }
      res = estimate_Ht(model, x, [&](const Point& y) { return phi.eval_on_E(model.domain, y); },
                        cfg.get_double("ht.t"), n, ro);
    } else {
      res = exit_kernel_mc(model, x, [&](const Point& y) { return phi.eval_on_E(model.domain, y); }, n, ro);
    }
    rows.push_back({x, res});
  }
  out.csv = estimates_csv(rows, seed);

  json pj = json::array();
  for (const auto& p : rows) {
    json j = result_json(p.r);
    j["x"] = point_json(p.x);
    pj.push_back(j);
  }
  s["probes"] = pj;

  if (command == "solve" && cfg.has("mech.r_compare")) {
    const double r2 = cfg.get_double("mech.r_compare");
    json cmp = json::array();
    bool all = true;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      // A disjoint stream family keeps the two estimates independent.
      const RunOptions ro = run_options(cfg, threads, substream_key(0x72636d70ULL, i));
      const EstimatorResult b = estimate_u(model, probes[i], phi, r2, n, ro, guard).result;
      const double pooled = std::hypot(rows[i].r.std_error, b.std_error);
      const double diff = rows[i].r.mean - b.mean;
      const bool ok = std::abs(diff) <= 3.0 * pooled;
      all = all && ok;
      cmp.push_back({{"x", point_json(probes[i])}, {"estimate_r_compare", b.mean}, {"stderr_r_compare", b.std_error},
                     {"diff", diff}, {"pooled_stderr", pooled}, {"within_3_pooled_stderr", ok}});
    }
    s["r_compare"] = {{"r", r}, {"r_compare", r2}, {"rows", cmp}, {"all_within_tolerance", all}};
  }

  const std::string oracle = cfg.get("compare.oracle");
  if (oracle != "none") {
    s["comparison"] = compare_block(rows, comparison_oracle(oracle, cfg, model, phi), default_slack(oracle));
    s["comparison"]["oracle"] = oracle;
  }
}

void run_oracle(const Config& cfg, RunOutput& out) {
  const Model model = build_model(cfg);
  const BoundaryData phi = build_phi(cfg, model.domain);
  const std::string method = cfg.get("oracle.method");
  json& s = out.summary;
  s["method"] = method;
  std::ostringstream os;
  if (method == "poisson") {
    const auto probes = probes_of(cfg);
    os << csv_header(model.domain.dim()) << ",value\n";
    for (const auto& x : probes) os << coords(x) << ',' << format_number(poisson_disk(model.domain, phi, x)) << '\n';
    out.csv = os.str();
    return;
  }
  require_local(model);
  const Grid1D g = oracle_grid(cfg, model.domain);
  GridFunction w;
  if (method == "newton" || method == "residual") {
    const auto [p0, p1] = endpoint_values(phi, model.domain);
    const NewtonResult nr = newton_bvp_1d(p0, p1, model.rate, model.law, g);
    s["iterations"] = nr.iterations;
    s["residual"] = residual_check(nr.u, model.rate, model.law, g);
    w = nr.u;
    if (method == "residual") {
      GridFunction f = sample_on_grid(g, [&](double x) { return phi.eval_on_E(model.domain, Point{x}); });
      const PicardResult pr = picard_duhamel_1d(f, cfg.get_double("ht.t"), model.law, model.rate, g);
      s["picard_t"] = cfg.get_double("ht.t");
      s["picard_residual"] = residual_check(pr.w, model.rate, model.law, g);
    }
  } else if (method == "picard") {
    GridFunction f = sample_on_grid(g, [&](double x) { return phi.eval_on_E(model.domain, Point{x}); });
    const PicardResult pr = picard_duhamel_1d(f, cfg.get_double("ht.t"), model.law, model.rate, g);
    s["iterations"] = pr.iterations;
    s["last_diff"] = pr.last_diff;
    s["time_steps"] = pr.time_steps;
    w = pr.w;
  } else {
    throw ConfigError("unknown oracle.method '" + method + "'");
  }
  os << "x,value\n";
  for (std::size_t i = 0; i < g.size(); ++i) os << format_number(g.node(i)) << ',' << format_number(w[i]) << '\n';
  out.csv = os.str();
}

std::vector<ApproachSequence> load_sequences(const std::string& path, const Domain& dom) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sequences file " + path);
  const std::size_t d = dom.dim();
  std::vector<std::pair<std::string, std::pair<Point, std::vector<Point>>>> groups;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line.starts_with("seq")) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 1 + 2 * d) throw ConfigError("sequence rows need seq,t1..td,x1..xd");
    std::vector<double> t, x;
    for (std::size_t i = 0; i < d; ++i) t.push_back(parse_list(cells[1 + i]).at(0));
    for (std::size_t i = 0; i < d; ++i) x.push_back(parse_list(cells[1 + d + i]).at(0));
    if (groups.empty() || groups.back().first != cells[0]) groups.push_back({cells[0], {Point::from(t), {}}});
    groups.back().second.second.push_back(Point::from(x));
  }
  std::vector<ApproachSequence> seqs;
  for (auto& [id, g] : groups) seqs.push_back(custom_sequence(dom, g.first, g.second));
  return seqs;
}

void run_converge(const Config& cfg, unsigned threads, RunOutput& out) {
  const Model model = build_model(cfg);
  const Domain& dom = model.domain;
  const BoundaryData phi = build_phi(cfg, dom);
  json& s = out.summary;

  std::vector<ApproachSequence> seqs;
  if (cfg.has("converge.sequences")) {
    seqs = load_sequences(cfg.get("converge.sequences"), dom);
  } else {
    const auto n = static_cast<std::size_t>(cfg.get_int("converge.n"));
    const double dmax = cfg.get_double("converge.d_max"), dmin = cfg.get_double("converge.d_min");
    const bool skewed = cfg.get("converge.style") == "skewed";
    for (const Point& y : cfg.get_points("converge.targets")) {
      seqs.push_back(skewed ? skewed_sequence(dom, y, n, dmax, dmin) : radial_sequence(dom, y, n, dmax, dmin));
    }
  }
  if (seqs.empty()) throw ConfigError("converge needs converge.targets or converge.sequences");

  BoundaryMap g;
  const std::string control = cfg.get("converge.control");
  if (control == "zero") {
    g = constant_map(0.0);
  } else if (control.starts_with("dist:")) {
    g = distance_power(phi.jump_set(dom), parse_list(control.substr(5)).at(0));
  } else {
    throw ConfigError("unknown converge.control '" + control + "'");
  }
  std::optional<FlowCase> fc;
  if (const Flow* f = model.flow()) fc = FlowCase{f, model.flow_cap_M};
  const ControlFunction k = build_control(g, dom, fc);

  ControlOptions opt;
  opt.k_cap = cfg.get_double("converge.k_cap");
  Evaluator u;
  const std::string source = cfg.get("converge.u");
  if (source == "poisson") {
    u = [&](const Point& x) { return Evaluation{poisson_disk(dom, phi, x), 0.0}; };
    opt.tol = Tolerance::oracle();
  } else if (source == "mc") {
    const auto n = static_cast<std::size_t>(cfg.get_int("sim.n_realizations"));
    const double r = cfg.get_double("mech.r");
    GuardOptions guard;
    guard.enabled = false;
    auto counter = std::make_shared<std::uint64_t>(0);
    u = [&, n, r, counter](const Point& x) {
      const EstimatorResult e = estimate_u(model, x, phi, r, n, run_options(cfg, threads, (*counter)++), guard).result;
      return Evaluation{e.mean, e.std_error};
    };
    opt.tol = Tolerance::monte_carlo();
  } else {
    throw ConfigError("unknown converge.u '" + source + "'");
  }

  // Evaluate once, then classify under each cap of the sensitivity scan.
  std::map<std::string, Evaluation> cache;
  Evaluator cached = [&](const Point& x) {
    const std::string key = x.to_string();
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, u(x)).first;
    return it->second;
  };
  const std::vector<Verdict> verdicts = check_controlled(cached, dom, phi, k, seqs, opt);
  bool scan_consistent = true;
  for (double cap : {1e3, 1e6, 1e9}) {
    ControlOptions o2 = opt;
    o2.k_cap = cap;
    const auto v2 = check_controlled(cached, dom, phi, k, seqs, o2);
    for (std::size_t i = 0; i < v2.size(); ++i) scan_consistent = scan_consistent && v2[i].kind == verdicts[i].kind;
  }

  std::ostringstream os;
  os << "seq," << csv_header(dom.dim()) << ",dist,u,k,tol\n";
  json vj = json::array();
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const Verdict& v = verdicts[i];
    for (std::size_t j = 0; j < seqs[i].points.size(); ++j) {
      os << i << ',' << coords(seqs[i].points[j]) << ',' << format_number(v.dist[j]) << ',' << format_number(v.u[j])
         << ',' << format_number(v.k[j]) << ',' << format_number(v.tol[j]) << '\n';
    }
    json j = {{"target", point_json(seqs[i].target)},
              {"verdict", to_string(v.kind)},
              {"k_divergent", v.k_divergent},
              {"phi_target", v.target_value},
              {"last_u", v.last_value},
              {"extrapolated_u", v.extrapolated},
              {"last_k", v.last_k},
              {"last_ratio", v.last_ratio},
              {"detail", v.detail}};
    if (v.offending) j["offending_index"] = *v.offending;
    vj.push_back(j);
  }
  out.csv = os.str();
  s["control"] = k.label;
  s["k_cap"] = opt.k_cap;
  s["verdicts"] = vj;
  s["k_cap_scan_consistent"] = scan_consistent;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Domain build_domain(const Config& cfg) {
  const std::string kind = cfg.get("domain.kind");
  Domain dom = [&] {
    if (kind == "interval") return Domain::interval(cfg.get_double("domain.a"), cfg.get_double("domain.b"));
    if (kind == "box") {
      return Domain::box(point_from(cfg.get_list("domain.lo"), "domain.lo"),
                         point_from(cfg.get_list("domain.hi"), "domain.hi"));
    }
    if (kind == "ball") {
      return Domain::ball(point_from(cfg.get_list("domain.center"), "domain.center"), cfg.get_double("domain.radius"));
    }
    throw ConfigError("unknown domain.kind '" + kind + "'");
  }();
  const double tol = cfg.get_double("domain.tol");
  return tol > 0.0 ? dom.with_boundary_tolerance(tol) : dom;
}

BoundaryData build_phi(const Config& cfg, const Domain& dom) {
  const std::string kind = cfg.get("phi.kind");
  const auto p = cfg.get_list("phi.params");
  auto need = [&](std::size_t n) {
    if (p.size() != n) throw ConfigError("phi.params for '" + kind + "' needs " + std::to_string(n) + " values");
  };
  BoundaryData phi = [&] {
    if (kind == "constant") {
      need(1);
      return BoundaryData::constant(p[0]);
    }
    if (kind == "endpoints") {
      need(2);
      return BoundaryData::interval_endpoints(p[0], p[1]);
    }
    if (kind == "arc") {
      need(2);
      if (dom.kind() != DomainKind::Ball || dom.dim() != 2) throw ConfigError("phi.kind arc needs a 2D ball");
      return BoundaryData::arc_indicator(p[0], p[1]);
    }
    throw ConfigError("unknown phi.kind '" + kind + "'");
  }();
  if (cfg.has("phi.sup_bound")) phi = phi.with_sup_bound(cfg.get_double("phi.sup_bound"));
  if (cfg.has("phi.jumps")) phi = phi.with_jumps(cfg.get_points("phi.jumps"));
  return phi;
}

Model build_model(const Config& cfg) {
  const Domain dom = build_domain(cfg);
  const std::string kind = cfg.get("motion.kind");
  Caps caps;
  caps.time_cap = cfg.get_double("sim.T_max");
  caps.population_cap = static_cast<std::size_t>(cfg.get_int("sim.N_max"));
  caps.h = cfg.get_double("sim.h");
  caps.validate();
  Motion motion = kind == "brownian" ? Motion(BrownianMotion{caps.h}) : Motion(build_flow(cfg, kind, dom.dim()));
  Model m{dom, motion, build_rate(cfg), build_law(cfg), build_kernel(cfg), caps, cfg.get_double("motion.cap_M")};
  return m;
}

RunOutput run(const std::string& command, const Config& cfg, unsigned threads) {
  RunOutput out;
  json& s = out.summary;
  s["command"] = command;
  const auto start = std::chrono::steady_clock::now();
  try {
    json echo = json::object();
    for (const auto& [k, v] : cfg.values()) {
      if (!v.empty()) echo[k] = v;
    }
    s["config"] = echo;
    s["seed"] = cfg.get_int("sim.seed");
    const Model model = build_model(cfg);
    s["model"] = {{"domain", model.domain.describe()},
                  {"motion", model.flow() ? model.flow()->describe() : "Brownian"},
                  {"rate", model.rate.describe()},
                  {"law", model.law.describe()},
                  {"kernel", model.kernel.describe()}};
    if (command == "solve" || command == "ht" || command == "exitkernel" || command == "flowsolve") {
      run_estimates(command, cfg, threads, out);
    } else if (command == "oracle") {
      run_oracle(cfg, out);
    } else if (command == "converge") {
      run_converge(cfg, threads, out);
    } else {
      throw ConfigError("unknown command '" + command + "'");
    }
    s["status"] = "ok";
  } catch (const ValidationError& e) {
    out.status = 2;
    s["status"] = "error";
    s["reason"] = e.reason();
    s["message"] = e.what();
  } catch (const ConfigError& e) {
    out.status = 3;
    s["status"] = "error";
    s["reason"] = "config_error";
    s["message"] = e.what();
  } catch (const std::exception& e) {
    out.status = 1;
    s["status"] = "error";
    s["reason"] = "runtime_error";
    s["message"] = e.what();
  }
  s["elapsed_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void write_outputs(const RunOutput& out, const std::string& dir, const std::string& command) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base = std::filesystem::path(dir) / command;
  if (!out.csv.empty()) {
    std::ofstream csv(base.string() + ".csv", std::ios::binary);
    csv << out.csv;
  }
  std::ofstream js(base.string() + ".json");
  js << out.summary.dump(2) << '\n';
}

}  // namespace nlbranch
