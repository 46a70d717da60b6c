#pragma once

#include <iosfwd>

namespace elastireg {

/// Entry point of the command-line tool. Exit codes: 0 success, 2 iteration cap, 1 error or failed check.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace elastireg
