#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dimc {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// Parses a full string as a double; throws std::invalid_argument.
double parse_number(std::string_view text);

using MetadataLines = std::vector<std::pair<std::string, std::string>>;

/// Builds a CSV file in memory: `#`-prefixed metadata, one header row, data
/// rows. Written atomically so reruns produce byte-identical files.
class CsvTable
{
  public:
    CsvTable(MetadataLines metadata, std::vector<std::string> columns);

    void add_row(std::vector<std::string> cells);
    void add_row(std::vector<double> const& values);

    std::size_t rows() const noexcept { return rows_.size(); }
    std::string str() const;
    void write(std::filesystem::path const& path) const;

  private:
    MetadataLines metadata_;
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace dimc
