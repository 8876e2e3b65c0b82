// Command-line front end: nlbranch <solve|ht|exitkernel|flowsolve|oracle|converge|preset> [options]

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlbranch/config.hpp"
#include "nlbranch/errors.hpp"
#include "nlbranch/runner.hpp"

namespace {

struct Common {
  std::string config_path;
  std::string preset_name;
  std::string out_dir;
  std::vector<std::string> assignments;
  long long seed = -1;
  unsigned threads = 1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "flat key = value file or JSON")->check(CLI::ExistingFile);
  sub->add_option("--preset", c.preset_name, "start from a shipped preset");
  sub->add_option("--seed", c.seed, "master seed (overrides sim.seed)");
  sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--out", c.out_dir, "directory for <command>.csv and <command>.json");
  sub->add_option("--set", c.assignments, "key=value override, repeatable");
}

// Precedence: defaults < preset < config file < environment < flags.
nlbranch::Config assemble(const Common& c) {
  nlbranch::Config cfg;
  if (!c.preset_name.empty()) cfg.merge(nlbranch::preset(c.preset_name));
  if (!c.config_path.empty()) cfg.merge(nlbranch::Config::load(c.config_path));
  cfg.apply_env();
  for (const auto& a : c.assignments) cfg.set_assignment(a);
  if (c.seed >= 0) cfg.set("sim.seed", std::to_string(c.seed));
  return cfg;
}

int execute(const std::string& command, const Common& c) {
  nlbranch::Config cfg;
  try {
    cfg = assemble(c);
  } catch (const nlbranch::Error& e) {
    std::cerr << "error: reason=config_error " << e.what() << '\n';
    return 3;
  }
  const nlbranch::RunOutput out = nlbranch::run(command, cfg, c.threads);
  if (!c.out_dir.empty()) {
    nlbranch::write_outputs(out, c.out_dir, command);
  } else if (out.status == 0) {
    std::cout << out.csv;
  }
  if (out.status != 0) {
    std::cerr << "error: reason=" << out.summary.value("reason", "unknown") << ' '
              << out.summary.value("message", "") << '\n';
  }
  return out.status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo solver for the nonlinear Dirichlet problem with branching processes"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve", "estimate u(x) by running the branching process to absorption"},
      {"ht", "estimate H_t phi(x) at time ht.t"},
      {"exitkernel", "estimate the killed exit kernel P^c_tau phi(x)"},
      {"flowsolve", "flow case through the pure branching process"},
      {"oracle", "deterministic reference solution"},
      {"converge", "controlled-convergence verdicts along approach sequences"},
  };
  std::vector<Common> opts(commands.size());
  std::string method, sequences, control;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i].first, commands[i].second);
    add_common(sub, opts[i]);
    if (commands[i].first == "oracle") {
      sub->add_option("--method", method, "picard | newton | poisson | residual");
    }
    if (commands[i].first == "converge") {
      sub->add_option("--sequences", sequences, "CSV of sequences: seq,t1..td,x1..xd");
      sub->add_option("--control", control, "dist:p | zero");
    }
  }

  std::string preset_name, preset_out;
  bool list = false;
  CLI::App* pre = app.add_subcommand("preset", "print a shipped preset as a flat config");
  pre->add_option("name", preset_name, "preset name");
  pre->add_flag("--list", list, "list preset names");
  pre->add_option("--out", preset_out, "write to a file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  if (pre->parsed()) {
    if (list || preset_name.empty()) {
      for (const auto& n : nlbranch::preset_names()) std::cout << n << '\n';
      return 0;
    }
    try {
      const std::string text = nlbranch::preset(preset_name).dump();
      if (preset_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream(preset_out) << text;
      }
    } catch (const nlbranch::Error& e) {
      std::cerr << "error: reason=config_error " << e.what() << '\n';
      return 3;
    }
    return 0;
  }

  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (!app.got_subcommand(commands[i].first)) continue;
    Common c = opts[i];
    if (!method.empty()) c.assignments.push_back("oracle.method=" + method);
    if (!sequences.empty()) c.assignments.push_back("converge.sequences=" + sequences);
    if (!control.empty()) c.assignments.push_back("converge.control=" + control);
    return execute(commands[i].first, c);
  }
  return 1;
}
