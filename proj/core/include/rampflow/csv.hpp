#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace rampflow {

/// Shortest decimal that round-trips to the same double; "NA" for NaN.
std::string format_double(double value);

/// Minimal comma-separated writer with byte-stable number formatting.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(std::initializer_list<std::string_view> columns);

  CsvWriter& operator<<(double value);
  CsvWriter& operator<<(long long value);
  CsvWriter& operator<<(int value) { return *this << static_cast<long long>(value); }
  CsvWriter& operator<<(long value) { return *this << static_cast<long long>(value); }
  CsvWriter& operator<<(std::string_view text);
  void end_row();

 private:
  void separator();
  std::ostream& out_;
  bool row_started_ = false;
};

}  // namespace rampflow
