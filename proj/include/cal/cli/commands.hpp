#pragma once

#include <ostream>

namespace cal::cli {

/// Entry point of the `calseg` tool. Returns the process exit status; diagnostics go to
/// `err`, normal output to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cal::cli
