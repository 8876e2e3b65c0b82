#include "nlbranch/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nlbranch/errors.hpp"

namespace nlbranch {

const std::vector<KeyInfo>& known_keys() {
  static const std::vector<KeyInfo> keys = {
      {"domain.kind", "interval", "interval | box | ball"},
      {"domain.a", "0", "interval left end"},
      {"domain.b", "1", "interval right end"},
      {"domain.lo", "", "box lower corner, comma list"},
      {"domain.hi", "", "box upper corner, comma list"},
      {"domain.center", "", "ball centre, comma list"},
      {"domain.radius", "1", "ball radius"},
      {"domain.tol", "0", "boundary tolerance"},
      {"phi.kind", "endpoints", "constant | endpoints | arc"},
      {"phi.params", "0,1", "constant: v; endpoints: at_lo,at_hi; arc: theta_begin,theta_end"},
      {"phi.sup_bound", "", "declared sup of phi (default: from params)"},
      {"phi.jumps", "", "extra jump points, x,y;x,y"},
      {"motion.kind", "brownian", "brownian | translation | product | vectorfield"},
      {"motion.h", "1e-3", "RK4 step of a vector field"},
      {"motion.direction", "", "translation velocity, comma list (product: one factor per coordinate)"},
      {"motion.field", "", "vectorfield matrix A of x' = A x + b, row-major comma list"},
      {"motion.offset", "", "vectorfield offset b, comma list"},
      {"motion.cap_M", "1000", "cap on flow entry times"},
      {"mech.c1", "1", "constant killing rate on D"},
      {"mech.c_table", "", "piecewise rate along axis 0: from:value,from:value"},
      {"mech.b", "2:1", "offspring law k:b_k,k:b_k"},
      {"mech.b_geometric", "", "beta,rho,k_max for b_k = beta rho^(k-1)"},
      {"mech.kernel", "local", "local | jitter:sigma | ball:rho"},
      {"mech.max_rejections", "64", "placement rejection budget"},
      {"mech.r", "1", "scaling r >= sup phi"},
      {"mech.r_compare", "", "second r for an invariance comparison"},
      {"sim.T_max", "1000", "time cap"},
      {"sim.N_max", "10000", "population cap"},
      {"sim.h", "1e-4", "time step of discretised paths"},
      {"sim.n_realizations", "10000", "realizations per probe"},
      {"sim.seed", "1", "master seed"},
      {"sim.clock_mode", "flow_modulated", "frozen_rate | flow_modulated"},
      {"probes", "0.5", "probe points x,y;x,y or a:b:n"},
      {"ht.t", "1", "time of H_t"},
      {"guard.enabled", "true", "run the Nagasawa guard before solves"},
      {"guard.pilot_n", "2000", "pilot paths per guard point"},
      {"guard.threshold", "0.01", "guard threshold on epsilon - 3 se"},
      {"compare.oracle", "none", "none | harmonic | newton | picard | flow_exact | exp_exit"},
      {"oracle.method", "newton", "picard | newton | poisson | residual"},
      {"oracle.m", "199", "interior grid nodes"},
      {"oracle.dt", "1e-3", "oracle time step"},
      {"converge.control", "dist:0.5", "dist:p (g = dist to jumps ^ -p) | zero"},
      {"converge.u", "poisson", "poisson | mc"},
      {"converge.targets", "", "approach targets on the boundary, x,y;x,y"},
      {"converge.style", "radial", "radial | skewed"},
      {"converge.n", "12", "points per sequence"},
      {"converge.d_max", "0.1", "first boundary distance"},
      {"converge.d_min", "1e-4", "last boundary distance"},
      {"converge.k_cap", "1e6", "cap on k for bounded/divergent classification"},
      {"converge.sequences", "", "CSV of sequences: seq,t1..td,x1..xd"},
  };
  return keys;
}

namespace {

const KeyInfo* find_key(const std::string& key) {
  for (const auto& k : known_keys()) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

std::string number_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void flatten(const nlohmann::json& j, const std::string& prefix, Config& cfg) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), cfg);
    }
    return;
  }
  std::string text;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) text += ',';
      text += j[i].is_string() ? j[i].get<std::string>() : (j[i].is_number() ? number_text(j[i].get<double>()) : j[i].dump());
    }
  } else if (j.is_string()) {
    text = j.get<std::string>();
  } else if (j.is_number_integer()) {
    text = std::to_string(j.get<long long>());
  } else if (j.is_number()) {
    text = number_text(j.get<double>());
  } else {
    text = j.dump();
  }
  cfg.set(prefix, text);
}

double parse_double(const std::string& key, const std::string& s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    // from_chars rejects "inf"/"+1e3" forms on some libraries; fall back.
    char* end = nullptr;
    v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) throw ConfigError("key " + key + ": not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

Config::Config() {
  for (const auto& k : known_keys()) values_[k.key] = k.default_value;
}

Config Config::parse_flat(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

Config Config::parse_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid JSON config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("JSON config must be an object");
  Config cfg;
  flatten(j, "", cfg);
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const bool json = (path.size() >= 5 && path.substr(path.size() - 5) == ".json") || trim(text).starts_with("{");
  return json ? parse_json(text) : parse_flat(text);
}

std::string Config::env_name(const std::string& key) {
  std::string name = "NLBRANCH_";
  for (char ch : key) name += ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return name;
}

void Config::apply_env() {
  for (const auto& k : known_keys()) {
    if (const char* v = std::getenv(env_name(k.key).c_str())) set(k.key, v);
  }
}

void Config::set(const std::string& key, const std::string& value) {
  if (find_key(key) == nullptr) throw ConfigError("unknown config key '" + key + "'");
  values_[key] = trim(value);
  if (std::find(explicit_.begin(), explicit_.end(), key) == explicit_.end()) explicit_.push_back(key);
}

void Config::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void Config::merge(const Config& other) {
  for (const auto& key : other.explicit_) set(key, other.get(key));
}

bool Config::has(const std::string& key) const { return !get(key).empty(); }

const std::string& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const { return parse_double(key, get(key)); }

long long Config::get_int(const std::string& key) const {
  const double v = get_double(key);
  if (v != std::floor(v)) throw ConfigError("key " + key + ": expected an integer");
  return static_cast<long long>(v);
}

bool Config::get_bool(const std::string& key) const {
  const std::string v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key " + key + ": expected a boolean");
}

std::vector<double> Config::get_list(const std::string& key) const {
  std::vector<double> out;
  if (!has(key)) return out;
  for (const auto& part : split(get(key), ',')) out.push_back(parse_double(key, part));
  return out;
}

std::vector<Point> Config::get_points(const std::string& key) const {
  std::vector<Point> out;
  if (!has(key)) return out;
  const std::string v = get(key);
  if (v.find(':') != std::string::npos) {
    const auto parts = split(v, ':');
    if (parts.size() != 3) throw ConfigError("key " + key + ": range must be a:b:n");
    const double a = parse_double(key, parts[0]), b = parse_double(key, parts[1]);
    const auto n = static_cast<std::size_t>(parse_double(key, parts[2]));
    if (n < 1) throw ConfigError("key " + key + ": range needs n >= 1");
    for (std::size_t i = 0; i < n; ++i) {
      const double s = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      out.push_back(Point{a + s * (b - a)});
    }
    return out;
  }
  for (const auto& item : split(v, ';')) {
    if (item.empty()) continue;
    std::vector<double> coords;
    for (const auto& c : split(item, ',')) coords.push_back(parse_double(key, c));
    out.push_back(Point::from(coords));
  }
  return out;
}

std::string Config::dump() const {
  std::ostringstream os;
  for (const auto& k : known_keys()) {
    const std::string& v = get(k.key);
    if (!v.empty()) os << k.key << " = " << v << '\n';
  }
  return os.str();
}

}  // namespace nlbranch
