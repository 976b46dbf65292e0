#pragma once

#include <iosfwd>

namespace ncerm {

/// Entry point of the ncerm command line tool. Returns the process exit
/// status: 0 on success (including --help), 2 on usage errors, 1 when a run
/// fails or a verification does not hold.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ncerm
