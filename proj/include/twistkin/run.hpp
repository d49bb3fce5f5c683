#pragma once

#include <string>
#include <vector>

#include "twistkin/config.hpp"

// Subcommand execution: each call writes its tables plus run_manifest.json
// into out_dir. Outputs carry no timestamps or machine state, so a rerun
// with the same config and seed is byte-identical.

namespace twistkin {

std::vector<std::string> subcommand_names();

struct RunResult {
  std::vector<std::string> files;  // basenames written into out_dir
  std::vector<std::string> notes;
  std::string resolved_json;  // effective parameters, one JSON object
};

// Throws SchemaError for an unknown subcommand or missing section, and the
// module errors otherwise; the CLI maps ValidationError to exit 2 and
// NumericalError to exit 3.
RunResult run_subcommand(const std::string& name, const RunConfig& cfg,
                         const std::string& out_dir);

}  // namespace twistkin
