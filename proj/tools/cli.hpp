#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace akdyn::cli {

constexpr int kOk = 0;
constexpr int kHardError = 1;
constexpr int kIndexFailures = 2;
constexpr int kNotCertified = 3;
constexpr int kUsage = 64;

/// Runs one command line (without the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace akdyn::cli
