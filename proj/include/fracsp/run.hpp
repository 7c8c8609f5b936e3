#pragma once

// Subcommand orchestration. Each subcommand writes <output.dir>/<name>.json
// (resolved config, results, failure list) plus its CSV table and optional
// field dumps, and returns the process exit status.

#include <ostream>
#include <string>
#include <vector>

#include "fracsp/config.hpp"

namespace fracsp {

const std::vector<std::string>& subcommand_names();
std::string usage_text();

// The resolved config as JSON text, keys sorted, mirroring the TOML layout.
std::string config_json(const RunConfig& cfg);

// 0 when every check of the subcommand passes, 1 otherwise (including
// numerical failures), 2 for an unknown subcommand. Progress goes to log.
int run(const std::string& subcommand, const RunConfig& cfg, std::ostream& log);

}  // namespace fracsp
