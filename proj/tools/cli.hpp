#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pltower::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kDegenerate = 2,
    kParse = 3,
    kBudget = 4,
    kPrecondition = 5,
};

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pltower::cli
