#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace padicprob::cli {

enum ExitCode : int {
    ok = 0,
    failure = 1,  // verification or statistical failure
    usage = 2,
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace padicprob::cli
