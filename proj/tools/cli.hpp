#pragma once

#include <iosfwd>

namespace gxt::cli {

/// Runs one subcommand. Returns 0 on success, 1 on a usage error, 2 when
/// the toolkit raised an error. Diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gxt::cli
