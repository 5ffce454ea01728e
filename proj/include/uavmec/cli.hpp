#pragma once

#include <ostream>

namespace uavmec {

/// Entry point of the command-line tool. Exit codes: 0 success, 1 error,
/// 2 a solve stopped at the iteration limit.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace uavmec
