#include "calabi/csv.hpp"

#include <charconv>
#include <cmath>

namespace calabi {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void CsvWriter::header(const std::vector<std::string>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) os_ << ',';
    os_ << cols[i];
  }
  os_ << '\n';
}

CsvWriter& CsvWriter::add(double v) {
  if (row_started_) os_ << ',';
  os_ << format_double(v);
  row_started_ = true;
  return *this;
}

CsvWriter& CsvWriter::add(long long v) {
  if (row_started_) os_ << ',';
  os_ << v;
  row_started_ = true;
  return *this;
}

CsvWriter& CsvWriter::add(const std::string& v) {
  if (row_started_) os_ << ',';
  os_ << v;
  row_started_ = true;
  return *this;
}

void CsvWriter::end_row() {
  os_ << '\n';
  row_started_ = false;
}

}  // namespace calabi
