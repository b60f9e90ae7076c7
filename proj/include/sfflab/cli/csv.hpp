#pragma once

// CSV tables with a leading "# key=value" comment block. Numbers are written
// in shortest round-trip form so output is byte-stable.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sfflab::cli {

using Cell = std::variant<double, long long, std::uint64_t, std::string>;

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void meta(const std::string& key, const std::string& value);
  void meta(const std::vector<std::pair<std::string, std::string>>& entries);
  void row(std::vector<Cell> cells);

  std::size_t rows() const { return rows_.size(); }
  std::string str() const;
  /// Writes atomically enough for our purposes: whole file or an Error.
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::string> rows_;
};

/// Writes `text` to `path`, creating parent directories; throws Error.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace sfflab::cli
