#pragma once

#include <iosfwd>

namespace bryc::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kValidation = 2,
  kVerification = 3,
};

/// Parses argv (argv[0] is the program name) and runs one subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

}  // namespace bryc::cli
