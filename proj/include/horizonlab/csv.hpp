#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace horizonlab::csv {

// %.17g: shortest representation that round-trips IEEE doubles
std::string format_double(double v);
std::string format_u64(unsigned long long v);

// Comma-separated, UTF-8, LF line endings, mandatory header row.
class Writer {
public:
    Writer(const std::filesystem::path& path, std::vector<std::string> header);
    void row(const std::vector<std::string>& cells);
    const std::filesystem::path& path() const { return path_; }
    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // throws FormatError naming the missing column
    std::size_t col(const std::string& name) const;
    double num(std::size_t row, std::size_t column) const;
    std::size_t size() const { return rows.size(); }
};

Table read(const std::filesystem::path& path);

} // namespace horizonlab::csv
