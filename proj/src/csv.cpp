#include "dimc/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace dimc {

std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto const [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{})
        throw std::runtime_error("format_number: to_chars failed");
    return std::string(buf, end);
}

double parse_number(std::string_view text)
{
    if (text == "nan")
        return std::nan("");
    if (text == "inf")
        return HUGE_VAL;
    if (text == "-inf")
        return -HUGE_VAL;
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    double value = 0.0;
    auto const [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    return value;
}

CsvTable::CsvTable(MetadataLines metadata, std::vector<std::string> columns)
    : metadata_(std::move(metadata)), columns_(std::move(columns))
{
}

void CsvTable::add_row(std::vector<std::string> cells)
{
    if (cells.size() != columns_.size())
        throw std::invalid_argument("CSV row has " + std::to_string(cells.size())
                                    + " cells, expected " + std::to_string(columns_.size()));
    rows_.push_back(std::move(cells));
}

void CsvTable::add_row(std::vector<double> const& values)
{
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values)
        cells.push_back(format_number(v));
    add_row(std::move(cells));
}

std::string CsvTable::str() const
{
    std::string out;
    for (auto const& [key, value] : metadata_)
        out += "# " + key + " = " + value + "\n";
    auto append_line = [&out](std::vector<std::string> const& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
        {
            if (i)
                out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    append_line(columns_);
    for (auto const& row : rows_)
        append_line(row);
    return out;
}

void CsvTable::write(std::filesystem::path const& path) const
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    auto const tmp = std::filesystem::path(path).concat(".tmp");
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os << str();
        if (!os)
            throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace dimc
