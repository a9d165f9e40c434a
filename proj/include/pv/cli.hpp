#pragma once

namespace pv {

// Full command-line front end.  Returns the process exit code:
// 0 success, 1 bad input/arguments, 2 numerical-robustness abort.
int run_cli(int argc, const char* const* argv);

}  // namespace pv
