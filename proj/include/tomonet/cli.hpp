#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tomonet/error.hpp"

namespace tomonet::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNumericalError = 3 };

ExitCode exit_code_for(ErrorKind kind);

/// Entry point shared by the executable and the tests. argv[0] is the program
/// name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

/// Human-readable summary of a dataset or checkpoint file. Read-only.
void inspect(const std::filesystem::path& path, std::ostream& out);

}  // namespace tomonet::cli
