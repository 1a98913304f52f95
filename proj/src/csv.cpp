#include "levylab/csv.hpp"

#include <fmt/format.h>

#include <stdexcept>

namespace levylab {

std::string csv_number(double v) { return fmt::format("{:.17g}", v); }

namespace {

std::string quote(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string field_text(const CsvField &f) {
  if (const auto *d = std::get_if<double>(&f)) return csv_number(*d);
  if (const auto *i = std::get_if<std::int64_t>(&f)) return std::to_string(*i);
  if (const auto *u = std::get_if<std::uint64_t>(&f)) return std::to_string(*u);
  return quote(std::get<std::string>(f));
}

} // namespace

CsvWriter::CsvWriter(const std::filesystem::path &path) : out_(path), path_(path) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
}

void CsvWriter::comment(std::string_view text) { out_ << "# " << text << '\n'; }

void CsvWriter::header(const std::vector<std::string> &columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << quote(columns[i]);
  out_ << '\n';
}

void CsvWriter::row(const std::vector<CsvField> &fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << field_text(fields[i]);
  out_ << '\n';
}

void CsvWriter::section(std::string_view name) { out_ << '\n' << name << '\n'; }

} // namespace levylab
