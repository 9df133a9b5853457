#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace srnsz::cli {

enum ExitCode : int {
    kOk = 0,
    kUserError = 2,   // bad flags, config, input files or missing models
    kCorruption = 3,  // corrupt artifact or model bundle
    kInternal = 4,    // invariant failure
};

/// Environment variable naming the default model registry directory.
inline constexpr const char* kModelDirEnv = "SRNSZ_MODEL_DIR";

/// Runs one command line (args[0] is the program name) and returns its exit
/// code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace srnsz::cli
