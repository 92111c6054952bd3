#pragma once

// Command-line front end. run_cli parses one subcommand invocation, drives
// the library, and writes a Report to `out` in CSV or JSON.
//
// Exit codes: 0 success; 2 usage (bad flags, invalid progression, unknown
// setting); 3 range/resource (x beyond the sieve limit, unusable cache
// directory); 4 internal-consistency failure (branch-tracking faults,
// failed self-test).

#include <iosfwd>

namespace mertens::cli {

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace mertens::cli
