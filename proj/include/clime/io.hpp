#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "clime/classify.hpp"
#include "clime/matrix.hpp"

namespace clime {

namespace io_detail {

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(trim(cur));
    return cells;
}

inline bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

/// shortest decimal that round-trips is not required; 17 significant digits
/// always reproduce the double exactly
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) lines.push_back(line);
    }
    return lines;
}

} // namespace io_detail

/// Rectangular numeric CSV. A non-numeric first row is treated as a header
/// and skipped. Errors carry 1-based row/column positions.
inline Matrix read_matrix_csv(const std::string& path) {
    const std::vector<std::string> lines = io_detail::read_lines(path);
    if (lines.empty()) throw CsvError(path + ": file is empty");

    size_t start = 0;
    {
        const auto cells = io_detail::split_csv_line(lines[0]);
        double v;
        bool numeric = true;
        for (const auto& c : cells)
            if (!io_detail::parse_double(c, v)) {
                numeric = false;
                break;
            }
        if (!numeric) start = 1;
    }
    if (start >= lines.size()) throw CsvError(path + ": no data rows");

    std::vector<std::vector<double>> rows;
    size_t width = 0;
    for (size_t r = start; r < lines.size(); ++r) {
        const auto cells = io_detail::split_csv_line(lines[r]);
        if (width == 0) width = cells.size();
        if (cells.size() != width)
            throw CsvError(path + ": row " + std::to_string(r + 1) + " has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(width));
        std::vector<double> vals(width);
        for (size_t c = 0; c < width; ++c) {
            if (!io_detail::parse_double(cells[c], vals[c]))
                throw CsvError(path + ": non-numeric cell at row " + std::to_string(r + 1) +
                               ", column " + std::to_string(c + 1));
        }
        rows.push_back(std::move(vals));
    }

    Matrix m(static_cast<int>(rows.size()), static_cast<int>(width));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < width; ++j) m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    return m;
}

inline void write_matrix_csv(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot open file for writing: " + path);
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ',';
            out << io_detail::format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw CsvError("write failed: " + path);
}

/// Labeled dataset CSV: header row required, first column holds the class
/// label, remaining columns the features. Labels may be the literals 1/2 or
/// exactly two distinct strings (the lexicographically smaller one becomes
/// class 1).
inline LabeledDataset read_labeled_csv(const std::string& path) {
    const std::vector<std::string> lines = io_detail::read_lines(path);
    if (lines.size() < 2) throw CsvError(path + ": need a header row and at least one data row");

    std::vector<std::string> raw_labels;
    std::vector<std::vector<double>> rows;
    size_t width = 0;
    for (size_t r = 1; r < lines.size(); ++r) {
        const auto cells = io_detail::split_csv_line(lines[r]);
        if (cells.size() < 2)
            throw CsvError(path + ": row " + std::to_string(r + 1) + " has no feature columns");
        if (width == 0) width = cells.size();
        if (cells.size() != width)
            throw CsvError(path + ": row " + std::to_string(r + 1) + " has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(width));
        raw_labels.push_back(cells[0]);
        std::vector<double> vals(width - 1);
        for (size_t c = 1; c < width; ++c)
            if (!io_detail::parse_double(cells[c], vals[c - 1]))
                throw CsvError(path + ": non-numeric cell at row " + std::to_string(r + 1) +
                               ", column " + std::to_string(c + 1));
        rows.push_back(std::move(vals));
    }

    std::map<std::string, int> distinct;
    for (const auto& l : raw_labels) distinct.emplace(l, 0);
    if (distinct.size() > 2) throw CsvError(path + ": more than two distinct labels");
    LabeledDataset data;
    if (distinct.size() == 2 && distinct.count("1") && distinct.count("2")) {
        for (const auto& l : raw_labels) data.labels.push_back(l == "1" ? 1 : 2);
    } else if (distinct.size() == 1 && (distinct.count("1") || distinct.count("2"))) {
        for (const auto& l : raw_labels) data.labels.push_back(l == "1" ? 1 : 2);
    } else {
        int next = 1;
        for (auto& [key, id] : distinct) id = next++; // std::map orders lexicographically
        for (const auto& l : raw_labels) data.labels.push_back(distinct[l]);
    }

    Matrix m(static_cast<int>(rows.size()), static_cast<int>(width - 1));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j + 1 < width; ++j)
            m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    data.features = DataMatrix(std::move(m));
    data.validate();
    return data;
}

} // namespace clime
