#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace persuasion::cli {

/// Runs one CLI invocation. Returns 0 on success, 2 on invalid arguments or
/// input, 3 when the request falls outside the characterized parameter
/// region. Results go to `out` (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

int run(int argc, char** argv);

}  // namespace persuasion::cli
