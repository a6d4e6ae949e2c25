#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace embsp::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3, kIo = 4 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses arguments, runs the selected subcommand and maps failures to exit codes.
int run(int argc, char** argv);

/// "1:4" (inclusive range) or "1,3,5"; 1-based. Indices must lie in 1..available.
std::vector<long> parse_column_list(const std::string& text, long available);

}  // namespace embsp::cli
