#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wmsense::cli {

/// Runs the `wmsense` command line. `args` excludes the program name.
/// Returns 0 on success, 1 on validation errors, 2 on I/O errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wmsense::cli
