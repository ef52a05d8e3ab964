#pragma once

namespace hyperfuse::app {

/// Parses arguments, runs one subcommand, and returns the process exit code
/// (0 success, 2 input/IO error, 3 validation/domain error).
int run_cli(int argc, char** argv);

}  // namespace hyperfuse::app
