#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ccm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one `ccm` invocation; `args` excludes the program name. Results go to
/// `out` (or the configured output file), a single-line error to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ccm::cli
