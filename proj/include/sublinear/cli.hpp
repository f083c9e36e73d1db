#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sublinear::cli {

enum ExitCode : int {
    kOk = 0,
    kIoFailure = 1,
    kUsage = 2,
    kPrecondition = 3,
    kNotConverged = 4,
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sublinear::cli
