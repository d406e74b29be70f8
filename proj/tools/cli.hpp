#pragma once

#include <iosfwd>

namespace p2k::cli {

/// Runs one CLI invocation. Returns 0 on success, 1 on a domain error, 2 on a
/// usage error. Results go to `out`, diagnostics and progress to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace p2k::cli
