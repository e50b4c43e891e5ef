#pragma once

#include <ostream>

namespace avgcell {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitNetlist = 2,
    kExitNumerical = 3,
};

/// Command-line driver. Writes averaged.csv, instantaneous.csv and
/// stats.txt to the output directory, plus oracle.csv and compare.txt with
/// --oracle. Returns one of the ExitCode values.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace avgcell
