#pragma once

namespace mnarp {

/// Entry point of the `mnarp` command-line tool. Exit codes: 0 success,
/// 1 I/O failure, 2 bad configuration or arguments, 3 numerical failure.
/// Failures print one `mnarp: error kind=... key=value ...` line to stderr.
int cli_main(int argc, char** argv);

} // namespace mnarp
