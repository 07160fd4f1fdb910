// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace otasync::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_io_error = 1;
inline constexpr int exit_usage = 2;

/// Parses argv, runs the selected subcommand and writes its result files.
/// Returns 0 on success, 2 for usage or validation errors, 1 for I/O
/// failures. Diagnostics go to `err`, reports to `out`.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace otasync::cli
