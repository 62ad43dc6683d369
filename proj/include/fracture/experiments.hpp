#pragma once

#include <string>

#include "fracture/config.hpp"
#include "fracture/energy.hpp"

namespace fracture {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kOutRootEnv = "FRACTURE2D_OUT_ROOT";

struct RunResult {
    bool ok = false;
    std::string dir;      // timestamped artifact directory
    std::string summary;  // contents of summary.txt
    std::string error;
};

/// Executes the configured experiment (cleavage | gamma | rigidity | loads |
/// partition-demo) into a fresh timestamped directory under the output root:
/// manifest.json, tables, summary.txt. Prior runs are never overwritten.
RunResult run_experiment(const Config& cfg, const std::string& out_root_override = "");

/// Rebuilds summary.txt from an existing artifact directory.
std::string regenerate_summary(const std::string& dir);

// Limit-triple JSON: {"u": field, "partition": partition, "motions": [...]}.
std::string triple_to_json(const LimitTriple& t);
LimitTriple triple_from_json(const std::string& text);

}  // namespace fracture
