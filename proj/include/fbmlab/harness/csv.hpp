#pragma once

#include <string>
#include <vector>

namespace fbmlab::harness {

// Shortest text with 17 significant digits; round-trips exactly.
std::string format_double(double v);

class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable &row();
  CsvTable &add(double v);
  CsvTable &add(long long v);
  CsvTable &add(unsigned long long v);
  CsvTable &add(const std::string &v);

  const std::vector<std::string> &header() const { return header_; }
  std::string str() const;
  void write(const std::string &path) const;

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

} // namespace fbmlab::harness
