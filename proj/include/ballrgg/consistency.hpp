#pragma once

// Small-scale oracle comparisons across all modules, bundled as one report.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ballrgg::consistency {

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;      ///< observed discrepancy or statistic
    double tolerance = 0.0;  ///< pass iff value <= tolerance
    std::string detail;
};

/// Replaceable entry points, so tests can inject faults and confirm the
/// suite catches them.
struct Hooks {
    std::function<double(double x, double a, double b)> beta_reg;
};

/// Runs every check; failures become report entries, never exceptions.
std::vector<CheckResult> consistency_suite(std::uint64_t seed, const Hooks& hooks = {});

}  // namespace ballrgg::consistency
