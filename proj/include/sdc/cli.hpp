#pragma once

#include <string>
#include <vector>

namespace sdc::cli {

// Exit codes: 0 success, 1 domain error, 2 usage error,
// 3 validation-suite failure.
int run(const std::vector<std::string>& args);

} // namespace sdc::cli
