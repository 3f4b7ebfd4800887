#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace bhq::io {

// Scientific notation with 17 significant digits: enough to round-trip any
// double, so identical runs produce byte-identical files.
std::string csv_double(double value);

// Comma-separated writer with a pinned header. Column counts are enforced per
// row; floats go through csv_double. Throws std::runtime_error on I/O errors.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();

  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void field(double value);
  void field(int value);
  void field(long long value);
  void field(std::string_view value);
  void end_row();

  template <class... Ts>
  void row(const Ts&... values) {
    (field(values), ...);
    end_row();
  }

  // Flushes and verifies the stream; called by the destructor as well, but
  // only an explicit close can report failure by throwing.
  void close();

 private:
  void raw(std::string_view text);

  std::string path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
  std::size_t current_ = 0;
  bool closed_ = false;
};

}  // namespace bhq::io
