#pragma once

#include <ostream>

namespace mixtv::cli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitTooLarge = 4;

/// Environment variable holding the default --workers value.
inline constexpr const char* kWorkersEnv = "MIXTV_WORKERS";

/// Runs one subcommand. The JSON report goes to `out`; a one-line summary or
/// a JSON error object goes to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mixtv::cli
