#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace labelkit {

// Exit codes: 0 success, 2 usage/config error, 3 labeling left ids
// unlabeled after retries.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPartial = 3;

int run_cli(std::vector<std::string> args, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

}  // namespace labelkit
