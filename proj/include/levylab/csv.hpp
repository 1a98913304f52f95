#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace levylab {

/// Shortest decimal text that round-trips the double ("%.17g" style).
std::string csv_number(double v);

using CsvField = std::variant<double, std::int64_t, std::uint64_t, std::string>;

/// Minimal CSV writer with deterministic number formatting.
class CsvWriter {
public:
  explicit CsvWriter(const std::filesystem::path &path);

  void comment(std::string_view text);
  void header(const std::vector<std::string> &columns);
  void row(const std::vector<CsvField> &fields);
  /// Blank line followed by a section marker line (e.g. "LADDER").
  void section(std::string_view name);

private:
  std::ofstream out_;
  std::filesystem::path path_;
};

} // namespace levylab
