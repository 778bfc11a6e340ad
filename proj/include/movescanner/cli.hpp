#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mvsc {

// movescanner <path>... [--format text|json] [--output FILE] [--checks LIST]
//             [--no-check NAME] [--max-paths N] [--back-edge-budget N]
//             [--fail-on SEV]
// Exit codes: 0 no findings at or above fail_on; 1 findings present; 2
// parse/load error; 3 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace mvsc
