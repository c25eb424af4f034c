#ifndef SPECSHIFT_CLI_HPP
#define SPECSHIFT_CLI_HPP

#include <string>
#include <vector>

namespace specshift {

/// Subcommand dispatch for the specshift tool. Returns the process exit
/// code: 0 success, 1 usage error, 2 data error, 3 numeric failure.
int cli_run(const std::vector<std::string>& args);

}  // namespace specshift

#endif
