#include "horizonlab/csv.hpp"

#include <cstdio>
#include <sstream>

#include "horizonlab/errors.hpp"

namespace horizonlab::csv {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_u64(unsigned long long v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%llu", v);
    return buf;
}

Writer::Writer(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), columns_(header.size()) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot open for writing: " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ << ',';
        out_ << header[i];
    }
    out_ << '\n';
}

void Writer::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
        throw FormatError("csv row width mismatch in " + path_.string());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
    if (!out_) throw IoError("write failure: " + path_.string());
}

void Writer::close() {
    out_.close();
    if (out_.fail()) throw IoError("close failure: " + path_.string());
}

std::size_t Table::col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw FormatError("missing column '" + name + "'");
}

double Table::num(std::size_t row, std::size_t column) const {
    const std::string& s = rows.at(row).at(column);
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw FormatError("trailing junk");
        return v;
    } catch (const FormatError&) {
        throw;
    } catch (...) {
        throw FormatError("non-numeric cell '" + s + "' in column '" +
                          header.at(column) + "'");
    }
}

static std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

Table read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty csv: " + path.string());
    t.header = split_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != t.header.size())
            throw FormatError("ragged row in " + path.string());
        t.rows.push_back(std::move(cells));
    }
    return t;
}

} // namespace horizonlab::csv
