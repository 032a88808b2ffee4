#pragma once

#include <ostream>

namespace gazescreen::cli {

/// Parses argv and runs one subcommand. Returns 0 on success, 1 on a
/// validation or usage error and 2 on a runtime failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gazescreen::cli
