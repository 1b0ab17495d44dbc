#pragma once

// Minimal CSV for numeric tables: header row, ',' separator, '.' decimal,
// no quoting (no field here ever contains a comma).

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ghzclock::app {

/// Shortest text that parses back to the same double, independent of the
/// locale. Magnitudes below 1e-3 (and above 1e16) use scientific notation.
[[nodiscard]] std::string format_double(double v);

/// Exact inverse of format_double; throws std::invalid_argument on junk.
[[nodiscard]] double parse_double(std::string_view text);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  CsvWriter& field(std::string_view text);
  CsvWriter& field(double v);
  CsvWriter& field(long long v);
  CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
  CsvWriter& field(std::size_t v) { return field(std::string_view(std::to_string(v))); }
  CsvWriter& field(bool v) { return field(std::string_view(v ? "true" : "false")); }
  /// Ends the row; throws std::logic_error if the field count is off.
  void end_row();

 private:
  std::ostream& out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index; throws std::out_of_range for an unknown name.
  [[nodiscard]] std::size_t column(std::string_view name) const;
  [[nodiscard]] double number(std::size_t row, std::string_view name) const;
};

[[nodiscard]] CsvTable parse_csv(std::string_view text);
[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);

}  // namespace ghzclock::app
