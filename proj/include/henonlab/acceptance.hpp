#pragma once

// The twelve end-to-end acceptance checks, shared by the acceptance test
// binary and `henonlab validate`.

#include <functional>
#include <string>
#include <vector>

namespace henonlab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    int threads = 1;
    /// Scratch directory for the determinism check; a temporary one when empty.
    std::string scratch_dir;
    /// Criteria to run; all when empty.
    std::vector<int> only;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  3 brolin-periodic: ..." style single line.
std::string format_result(const CriterionResult& r);

}  // namespace henonlab
