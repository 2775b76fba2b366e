#pragma once

namespace csmpd {

/// Full command-line front end. Exit codes: 0 success, 1 computational
/// failure, 2 configuration/usage error, 64 unknown subcommand.
int run_cli(int argc, const char* const* argv);

} // namespace csmpd
