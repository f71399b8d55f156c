#pragma once

#include <ostream>

namespace celerlog::cli {

// Runs the command line and returns the process exit code: 0 on success,
// 2 on a usage error or any fatal error.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace celerlog::cli
