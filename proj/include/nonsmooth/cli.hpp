#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nonsmooth::cli {

/// Exit codes: 0 success, 1 usage or input error, 2 validation failure.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kValidation = 2;

/// args excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

}  // namespace nonsmooth::cli
