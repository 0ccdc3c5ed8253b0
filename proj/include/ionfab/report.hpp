#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace ionfab {

// Shortest decimal string that parses back to the same double.
std::string format_number(double value);

// RFC 4180 quoting only when a field needs it.
std::string csv_escape(const std::string& field);
std::string csv_line(const std::vector<std::string>& fields);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string str() const;
};

// Sorted keys, two-space indent, trailing newline.
std::string json_text(const nlohmann::json& doc);

// Writes to `path`, or to `out` when path is empty or "-".
void emit_text(const std::string& text, const std::filesystem::path& path, std::ostream& out);

std::string read_file(const std::filesystem::path& path);

}  // namespace ionfab
