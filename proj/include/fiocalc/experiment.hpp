#pragma once

#include "fiocalc/common.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace fiocalc {

struct ExperimentOutcome {
    int exit_code = 0;  // 0 success, 1 usage or domain error, 2 verification mismatch
    std::vector<std::string> files;
    std::string summary;
};

/// Executes one experiment described by a JSON config (see
/// docs/experiment-schema.json).  Artifacts are written under `out_dir`;
/// identical config and seed produce byte-identical files.  Usage errors
/// throw ValidationError; verification mismatches are reported through the
/// exit code with the failing check named in the summary.
ExperimentOutcome run_experiment(const nlohmann::json& config, const std::string& out_dir,
                                 std::ostream& log);

/// Default output directory: the FIOCALC_OUT_DIR environment variable when
/// set, "." otherwise.
std::string default_out_dir();

}  // namespace fiocalc
