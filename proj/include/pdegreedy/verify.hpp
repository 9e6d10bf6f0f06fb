#pragma once

#include <string>
#include <vector>

namespace pdegreedy {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyOptions {
    int threads = 1;
    // test hook: perturbs the third kernel derivative inside the
    // closed-form route so the finite-difference check must fail
    bool inject_kernel_fault = false;
};

/// Small-scale executable self-checks: finite-difference kernel oracles,
/// dense-oracle equivalence, monotonicity, constraint satisfaction, and
/// thread-hint determinism. All pass on a healthy build.
std::vector<CheckResult> run_verification(const VerifyOptions& options);

}  // namespace pdegreedy
