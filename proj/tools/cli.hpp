#pragma once

#include <iosfwd>

namespace ifs::cli {

/// Runs one command line. Returns 0 on success or a true verdict, 1 on a
/// false verdict and 2 on usage or input errors (one line on `err`).
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ifs::cli
