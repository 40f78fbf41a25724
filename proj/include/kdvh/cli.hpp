#pragma once

#include <iostream>

namespace kdvh::cli {

/// Entry point of the `kdvh` tool. Exit codes: 0 success, 1 invalid input or
/// configuration, 2 numerical failure (including partially failed sweeps).
/// Errors are reported as a one-line JSON object on `err`.
int run(int argc, const char* const* argv, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);

}  // namespace kdvh::cli
