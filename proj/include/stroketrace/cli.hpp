#ifndef STROKETRACE_CLI_HPP
#define STROKETRACE_CLI_HPP

#include <exception>
#include <ostream>

namespace stroketrace {

enum ExitCode : int {
    kExitOk = 0,
    kExitIo = 1,
    kExitValidation = 2,
    kExitInternal = 3,
};

/// Maps a library exception to the process exit code.
int exit_code_for(const std::exception& e) noexcept;

/// Entry point of the `stroketrace` tool. Subcommands: convert, synth,
/// eval, render, bench. Results go to `out`, diagnostics and timings to
/// `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace stroketrace

#endif
