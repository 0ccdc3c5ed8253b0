#include "ionfab/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ionfab/errors.hpp"

namespace ionfab {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("number formatting failed");
  return std::string(buf, ptr);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_escape(fields[i]);
  }
  line += '\n';
  return line;
}

std::string CsvTable::str() const {
  std::string out = csv_line(header);
  for (const auto& row : rows) out += csv_line(row);
  return out;
}

std::string json_text(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

void emit_text(const std::string& text, const std::filesystem::path& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    out.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write " + path.string());
  file << text;
  if (!file) throw IoError("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ionfab
