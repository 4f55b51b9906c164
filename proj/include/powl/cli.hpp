#pragma once

#include <iosfwd>

namespace wfpowl {

enum ExitCode : int {
  kExitOk = 0,
  kExitConversionFailure = 1,
  kExitInvalidInput = 2,
  kExitVerificationFailure = 3,
  kExitInternalError = 4,
};

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv);

}  // namespace wfpowl
