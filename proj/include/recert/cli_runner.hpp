#pragma once

namespace recert {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes: 0 success, 1 certification negative (no safe time in horizon),
// 2 usage/input error, 3 environment error (unwritable outputs and similar).
int run_cli(int argc, char** argv);

} // namespace recert
