#pragma once

#include <iosfwd>

namespace flatmaj::cli {

// Full command-line entry point. Reports go to `out` (or the configured
// output file); diagnostics go to `err`. Returns the process exit code:
// 0 success, 1 selftest failure, 2 hypothesis violation, 3 malformed input,
// 4 undetermined or numerically inconclusive.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace flatmaj::cli
