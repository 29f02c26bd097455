#pragma once

#include <iosfwd>

namespace card {

/// Entry point of the `card` tool. Returns the process exit code: 0 on
/// success, 2 for invalid arguments or configuration (nothing written),
/// 1 for failures while running.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace card
