#pragma once

#include <string>

#include <json.hpp>

#include "nlbranch/boundary_data.hpp"
#include "nlbranch/branching.hpp"
#include "nlbranch/config.hpp"

namespace nlbranch {

Domain build_domain(const Config& cfg);
BoundaryData build_phi(const Config& cfg, const Domain& dom);
Model build_model(const Config& cfg);

struct RunOutput {
  /// 0 ok, 2 validation failure, 3 configuration error, 1 anything else.
  int status = 0;
  std::string csv;
  nlohmann::json summary;
};

/// Runs one of solve | ht | exitkernel | flowsolve | oracle | converge.
/// Errors are reported through the status and summary, never thrown.
RunOutput run(const std::string& command, const Config& cfg, unsigned threads);

/// Writes <dir>/<command>.csv and <dir>/<command>.json.
void write_outputs(const RunOutput& out, const std::string& dir, const std::string& command);

/// %.17g, the CSV number format.
std::string format_number(double v);

}  // namespace nlbranch
