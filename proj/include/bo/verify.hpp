#pragma once

// Invariant checks behind the `verify` subcommand.

#include <cstdint>
#include <string>
#include <vector>

namespace bo {

struct CheckResult {
    std::string suite;
    std::string name;
    bool pass = false;
    double value = 0.0;      ///< measured quantity
    double tolerance = 0.0;  ///< threshold it is compared with
    std::string detail;
};

struct VerifyOptions {
    std::string suite = "all";  ///< hardy, lax, birkhoff, flow, counterexample or all
    int modes = 128;            ///< truncation M of the Lax matrix
    std::uint64_t seed = 1;
};

/// Runs the requested suite; an exception inside a check is reported as a failing row.
std::vector<CheckResult> run_verify(const VerifyOptions& options);

/// Fixed-width PASS/FAIL table.
std::string format_verify_table(const std::vector<CheckResult>& results);

}  // namespace bo
