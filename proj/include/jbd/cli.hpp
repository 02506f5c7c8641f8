#pragma once

namespace jbd {

// Entry point of the command-line driver; argv[0] is the program name.
// Subcommands: run (one strategy, full diagnostics artifacts), compare
// (all three strategies, timing table), gen (write a builtin pair to disk).
//
// Exit codes: 0 success, 2 usage error, 3 breakdown (partial artifacts are
// still flushed), 4 inner-solver failure, 5 file I/O failure, 1 anything else.
int cli_main(int argc, const char* const* argv);

}  // namespace jbd
