#ifndef MORANDIM_CLI_HPP
#define MORANDIM_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace morandim::cli {

/// Parses arguments, runs the requested subcommand, and writes the result
/// document to the configured output path ("-" means `out`). Exit codes:
/// 0 on success, 1 when a computed assertion or consistency check fails,
/// 2 on input errors (bad arguments, config parse failures, violated
/// preconditions or budgets).
///
/// Same arguments, same config, same seed: byte-identical output documents.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace morandim::cli

#endif
