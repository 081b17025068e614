#pragma once

#include <iosfwd>

#include "qpd/cli/config.hpp"

namespace qpd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Parses arguments, resolves the configuration and runs the subcommand.
int run_cli(int argc, const char* const* argv, const Environment& env, std::ostream& out,
            std::ostream& err);

}  // namespace qpd::cli
