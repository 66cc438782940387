#pragma once

#include <iosfwd>

namespace lsr {

// Exit codes: 0 success, 1 usage or validation error, 2 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNumerical = 2;

auto cli_main(int argc, char const *const *argv, std::ostream &out, std::ostream &err) -> int;

} // namespace lsr
