#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace adastrat {

// Minimal CSV dialect: one header row, comma separators, '\n' line ends,
// no quoting (fields never contain commas). Doubles are printed in
// shortest round-trip form with '.' decimal regardless of locale.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string format_double(double value);
std::string format_int(std::int64_t value);

std::string to_string(const CsvTable& table);
CsvTable parse_csv(std::string_view text);

CsvTable read_csv(const std::filesystem::path& path);

// Write via a temporary sibling file and rename, so readers never see a
// partial table.
void write_csv_atomic(const std::filesystem::path& path, const CsvTable& table);

}  // namespace adastrat
