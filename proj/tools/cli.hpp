#pragma once

#include <iosfwd>

namespace cdmkit::cli {

/// Runs one cdmkit subcommand. Returns 0 on success, 1 on a numerical
/// failure and 2 on a usage error; diagnostics go to `err` as one line.
/// Results go to --out when given, otherwise to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cdmkit::cli
