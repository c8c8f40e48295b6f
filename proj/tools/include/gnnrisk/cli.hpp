#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gnnrisk {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitInternalError = 2;

/// `gnnrisk <subcommand> [--config PATH] [--out DIR] [--seed U64] [--jobs K] [--key value ...]`.
/// Precedence, lowest first: subcommand defaults, SRL_SEED, config file, flags.
/// On success the last line written to `out` is the manifest path.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same, with args[0] taken as the program name.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gnnrisk
