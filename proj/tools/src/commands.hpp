#pragma once

namespace amfg::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageOrIo = 1,
  kValidityFailure = 2,
  kVerdictFailure = 3,
};

int run(int argc, char** argv);

}  // namespace amfg::cli
