#include "sfflab/cli/csv.hpp"

#include <fstream>

#include "sfflab/cli/config.hpp"
#include "sfflab/error.hpp"

namespace sfflab::cli {
namespace {

std::string render(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* u = std::get_if<std::uint64_t>(&c)) return std::to_string(*u);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::meta(const std::string& key, const std::string& value) {
  meta_.emplace_back(key, value);
}

void CsvTable::meta(const std::vector<std::pair<std::string, std::string>>& entries) {
  meta_.insert(meta_.end(), entries.begin(), entries.end());
}

void CsvTable::row(std::vector<Cell> cells) {
  if (cells.size() != columns_.size()) {
    throw InvalidArgument("csv: row has " + std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(columns_.size()));
  }
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += render(cells[i]);
  }
  rows_.push_back(std::move(line));
}

std::string CsvTable::str() const {
  std::string out;
  for (const auto& [k, v] : meta_) out += "# " + k + "=" + v + "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += columns_[i];
  }
  out += '\n';
  for (const auto& r : rows_) out += r + '\n';
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw Error("write to " + path.string() + " failed");
}

}  // namespace sfflab::cli
