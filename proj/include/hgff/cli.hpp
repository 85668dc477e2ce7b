#pragma once

namespace hgff {

// Parses argv, runs the selected subcommand, and maps every outcome onto a
// process exit code: 0 success, 2 usage error, 1 domain/capacity failure.
// Never throws, never aborts.
int parse_and_dispatch(int argc, char** argv);

}  // namespace hgff
