#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ionfab::cli {

inline constexpr const char* kVersion = "0.1.0";

// Runs one command line. Exit codes: 0 success, 1 domain or I/O error,
// 2 usage error. Data goes to `out` or --out files, diagnostics to `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string sha256_hex(const std::string& bytes);

}  // namespace ionfab::cli
