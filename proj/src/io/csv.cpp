#include "bhq/io/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace bhq::io {

std::string csv_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::trunc), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot open '" + path + "' for writing");
  if (header.empty()) throw std::runtime_error("csv header must not be empty");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) raw(",");
    raw(header[i]);
  }
  raw("\n");
}

CsvWriter::~CsvWriter() {
  try {
    close();
  } catch (...) {
    // Destructors must not throw; an explicit close() reports the failure.
  }
}

void CsvWriter::field(double value) { field(std::string_view(csv_double(value))); }

void CsvWriter::field(int value) { field(static_cast<long long>(value)); }

void CsvWriter::field(long long value) { field(std::string_view(std::to_string(value))); }

void CsvWriter::field(std::string_view value) {
  if (current_ >= columns_)
    throw std::runtime_error("csv row in '" + path_ + "' has more fields than the header");
  if (current_ > 0) raw(",");
  raw(value);
  ++current_;
}

void CsvWriter::end_row() {
  if (current_ != columns_)
    throw std::runtime_error("csv row in '" + path_ + "' has fewer fields than the header");
  raw("\n");
  current_ = 0;
}

void CsvWriter::close() {
  if (closed_) return;
  closed_ = true;
  if (current_ != 0) throw std::runtime_error("csv file '" + path_ + "' closed mid-row");
  out_.flush();
  if (!out_) throw std::runtime_error("write to '" + path_ + "' failed");
  out_.close();
}

void CsvWriter::raw(std::string_view text) { out_.write(text.data(), text.size()); }

}  // namespace bhq::io
