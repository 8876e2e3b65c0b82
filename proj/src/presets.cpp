#include <utility>

#include "nlbranch/config.hpp"
#include "nlbranch/errors.hpp"

namespace nlbranch {
namespace {

using Entries = std::vector<std::pair<std::string, std::string>>;

const std::vector<std::pair<std::string, Entries>>& table() {
  static const std::vector<std::pair<std::string, Entries>> presets = {
      {"linear-interval",
       {{"domain.kind", "interval"},
        {"motion.kind", "brownian"},
        {"mech.c1", "0"},
        {"mech.b", "2:1"},
        {"phi.kind", "endpoints"},
        {"phi.params", "0,1"},
        {"probes", "0.1:0.9:9"},
        {"sim.h", "1e-3"},
        {"sim.n_realizations", "100000"},
        {"sim.seed", "1001"},
        {"compare.oracle", "harmonic"}}},
      {"kpp-interval",
       {{"domain.kind", "interval"},
        {"motion.kind", "brownian"},
        {"mech.c1", "1"},
        {"mech.b", "2:1"},
        {"phi.kind", "endpoints"},
        {"phi.params", "0.2,0.8"},
        {"probes", "0.1:0.9:9"},
        {"sim.h", "2.5e-4"},
        {"sim.n_realizations", "100000"},
        {"sim.seed", "1002"},
        {"compare.oracle", "newton"}}},
      {"ht-interval",
       {{"domain.kind", "interval"},
        {"motion.kind", "brownian"},
        {"mech.c1", "1"},
        {"mech.b", "2:1"},
        {"phi.kind", "endpoints"},
        {"phi.params", "0.2,0.8"},
        {"probes", "0.1;0.3;0.5;0.7;0.9"},
        {"ht.t", "0.2"},
        {"sim.h", "2.5e-4"},
        {"sim.n_realizations", "20000"},
        {"sim.seed", "1003"},
        {"compare.oracle", "picard"}}},
      {"fixed-point",
       {{"domain.kind", "interval"},
        {"motion.kind", "brownian"},
        {"mech.c1", "1"},
        {"mech.b", "2:1"},
        {"phi.kind", "constant"},
        {"phi.params", "1"},
        {"probes", "0.1:0.9:9"},
        {"sim.h", "1e-3"},
        {"sim.n_realizations", "10000"},
        {"sim.seed", "1004"}}},
      {"flow-exit",
       {{"domain.kind", "interval"},
        {"motion.kind", "translation"},
        {"motion.direction", "1"},
        {"mech.c1", "1"},
        {"phi.kind", "constant"},
        {"phi.params", "1"},
        {"probes", "0.05:0.95:10"},
        {"sim.n_realizations", "1000"},
        {"sim.seed", "1005"},
        {"compare.oracle", "flow_exact"}}},
      {"flow-composition",
       {{"domain.kind", "interval"},
        {"motion.kind", "translation"},
        {"motion.direction", "1"},
        {"mech.c1", "0.5"},
        {"mech.b", "2:1"},
        {"phi.kind", "endpoints"},
        {"phi.params", "0,0.5"},
        {"probes", "0.1;0.3;0.5;0.7;0.9"},
        {"sim.n_realizations", "100000"},
        {"sim.seed", "1006"},
        {"sim.clock_mode", "flow_modulated"}}},
      {"scaling-invariance",
       {{"domain.kind", "interval"},
        {"motion.kind", "brownian"},
        {"mech.c1", "1"},
        {"mech.b_geometric", "0.45,0.5,12"},
        {"mech.r", "1.1"},
        {"mech.r_compare", "1"},
        {"phi.kind", "endpoints"},
        {"phi.params", "0.3,0.9"},
        {"probes", "0.1;0.3;0.5;0.7;0.9"},
        {"sim.h", "1e-3"},
        {"sim.n_realizations", "40000"},
        {"sim.seed", "1007"}}},
      {"exp-exit-interval",
       {{"domain.kind", "interval"},
        {"motion.kind", "brownian"},
        {"mech.c1", "1"},
        {"phi.kind", "constant"},
        {"phi.params", "1"},
        {"probes", "0.5"},
        {"sim.h", "1e-4"},
        {"sim.n_realizations", "100000"},
        {"sim.seed", "1008"},
        {"compare.oracle", "exp_exit"}}},
      {"disk-jump",
       {{"domain.kind", "ball"},
        {"domain.center", "0,0"},
        {"domain.radius", "1"},
        {"motion.kind", "brownian"},
        {"mech.c1", "0"},
        {"phi.kind", "arc"},
        {"phi.params", "0,3.141592653589793"},
        {"converge.control", "dist:0.5"},
        {"converge.u", "poisson"},
        {"converge.targets", "1,0;-1,0;0,1;0,-1"},
        {"converge.n", "12"},
        {"converge.d_max", "0.1"},
        {"converge.d_min", "1e-4"},
        {"probes", "0,0;0.5,0.5;0,-0.5"},
        {"sim.seed", "1009"}}},
  };
  return presets;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, entries] : table()) names.push_back(name);
  return names;
}

Config preset(const std::string& name) {
  for (const auto& [n, entries] : table()) {
    if (n != name) continue;
    Config cfg;
    for (const auto& [k, v] : entries) cfg.set(k, v);
    return cfg;
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

}  // namespace nlbranch
