#pragma once

#include <ostream>

namespace axmul::cli {

inline constexpr const char* kToolVersion = "1.0.0";

/// Entry point shared by the executable and the tests. Returns 0 on success,
/// 2 for usage errors and 1 for everything else; failures print one line
/// `error: <kind>: <message>` to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace axmul::cli
