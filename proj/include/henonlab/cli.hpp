#pragma once

// Batch command surface: render-green, julia-cloud, periodic-report,
// entropy-report and validate.

#include <ostream>
#include <string>
#include <vector>

#include "henonlab/config.hpp"
#include "henonlab/parallel.hpp"

namespace henonlab {

enum ExitCode : int {
    kExitOk = 0,
    kExitCriterionFailed = 1,
    kExitContract = 2,
    kExitIncomplete = 3,
    kExitIo = 4,
};

/// Runs tasks on `threads` worker threads (serially for 1). The exception of
/// the lowest failing task index is rethrown after all workers finish.
ParallelFor make_thread_parallel(int threads);

/// Each command writes its files into config.out and returns an exit code
/// (kExitIncomplete when results are partial or inconclusive).
int cmd_render_green(const JobConfig& config, std::ostream& log);
int cmd_julia_cloud(const JobConfig& config, std::ostream& log);
int cmd_periodic_report(const JobConfig& config, std::ostream& log);
int cmd_entropy_report(const JobConfig& config, std::ostream& log);
int cmd_validate(const JobConfig& config, std::ostream& log);

/// Full command line (args[0] is the program name). Library errors are
/// mapped to exit codes: ContractError 2, IncompleteError 3, IoError 4.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace henonlab
