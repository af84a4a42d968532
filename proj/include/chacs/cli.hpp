#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chacs {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

/// Entry point shared by the `chacs` executable and the tests. `args`
/// excludes the program name. Returns 0 on success, 1 on validation errors and
/// 2 on numerical failures; every failure prints one diagnostic line to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace chacs
