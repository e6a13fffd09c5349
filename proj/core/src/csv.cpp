#include "rampflow/csv.hpp"

#include <charconv>
#include <cmath>

namespace rampflow {

std::string format_double(double value) {
  if (std::isnan(value)) return "NA";
  if (value == 0.0) return "0";
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ec == std::errc() ? ptr : buffer);
}

void CsvWriter::header(std::initializer_list<std::string_view> columns) {
  for (auto column : columns) *this << column;
  end_row();
}

void CsvWriter::separator() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

CsvWriter& CsvWriter::operator<<(double value) {
  separator();
  out_ << format_double(value);
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long value) {
  separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view text) {
  separator();
  out_ << text;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_started_ = false;
}

}  // namespace rampflow
