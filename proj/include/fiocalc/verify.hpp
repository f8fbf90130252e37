#pragma once

#include "fiocalc/common.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fiocalc {

struct CriterionResult {
    std::string id;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::uint64_t seed = 20240817u;
    std::vector<std::string> only;  // empty: run everything
};

/// Runs the verification battery, one criterion per result, logging a
/// PASS/FAIL line per criterion to `log`.
std::vector<CriterionResult> verify_suite(const VerifyOptions& opts, std::ostream& log);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace fiocalc
