#pragma once

#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ncerm::csv {

/// 17 significant digits: enough to round-trip any double.
inline std::string format(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

/// Minimal row writer. Fields are written verbatim; callers format numbers.
class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void header(std::initializer_list<std::string_view> names) {
    write_fields(std::vector<std::string>(names.begin(), names.end()));
  }

  void row(const std::vector<std::string>& fields) { write_fields(fields); }

 private:
  void write_fields(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

  std::ostream& out_;
};

}  // namespace ncerm::csv
