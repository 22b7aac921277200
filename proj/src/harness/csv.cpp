#include "fbmlab/harness/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "fbmlab/core.hpp"

namespace fbmlab::harness {

std::string format_double(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable &CsvTable::row() {
  rows_.emplace_back();
  rows_.back().reserve(header_.size());
  return *this;
}

CsvTable &CsvTable::add(double v) { return add(format_double(v)); }

CsvTable &CsvTable::add(long long v) { return add(std::to_string(v)); }

CsvTable &CsvTable::add(unsigned long long v) { return add(std::to_string(v)); }

CsvTable &CsvTable::add(const std::string &v) {
  if (rows_.empty())
    throw Error("CsvTable::add before row()");
  if (rows_.back().size() == header_.size())
    throw Error("CsvTable row has more fields than the header");
  if (v.find_first_of(",\"\n") == std::string::npos) {
    rows_.back().push_back(v);
  } else {
    std::string q = "\"";
    for (char c : v) {
      if (c == '"')
        q += '"';
      q += c;
    }
    rows_.back().push_back(q + "\"");
  }
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string> &fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i)
        out += ',';
      out += fields[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto &r : rows_) {
    if (r.size() != header_.size())
      throw Error("CsvTable row has fewer fields than the header");
    line(r);
  }
  return out;
}

void CsvTable::write(const std::string &path) const {
  const std::string text = str();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error("cannot write '" + path + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out)
    throw Error("write failed for '" + path + "'");
}

} // namespace fbmlab::harness
