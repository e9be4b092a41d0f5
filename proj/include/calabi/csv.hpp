#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace calabi {

// Doubles are serialized with up to 17 significant digits so values round-trip
// exactly; output is locale-independent and byte-deterministic.
std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void header(const std::vector<std::string>& cols);
  CsvWriter& add(double v);
  CsvWriter& add(long long v);
  CsvWriter& add(const std::string& v);
  void end_row();

 private:
  std::ostream& os_;
  bool row_started_ = false;
};

}  // namespace calabi
