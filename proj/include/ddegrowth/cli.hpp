#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ddegrowth {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitVerificationFailed = 1,
    kExitConfigError = 2,
    kExitNumericError = 3,
};

/// Runs one command. args excludes the program name and is any mix of
///
///   <command>          simulate | predict | verify | sweep | chareq | envelope
///   <config file>      key = value lines
///   key=value          overrides applied after the file
///
/// e.g. `chareq C=1 tau=1` or `verify configs/sublinear.cfg`. Reports go to
/// out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ddegrowth
