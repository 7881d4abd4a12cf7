#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mrsim {

/// Full command-line front end, callable in-process for tests. `args`
/// excludes the program name. Returns the process exit status: 0 success,
/// 1 domain failure (diagnostics on err), 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// FNV-1a 64-bit content hash, as 16 lowercase hex digits.
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

}  // namespace mrsim
