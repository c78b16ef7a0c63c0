#pragma once

#include <string>
#include <vector>

namespace fieldwork {

// Minimal CSV support for the formats this project reads and writes:
// comma-separated, header row, optional double-quoted fields, UTF-8.
// Fields never need embedded commas on the write side.

struct CsvTable {
    std::string path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index by header name; throws ValidationError if absent.
    std::size_t column(const std::string& name) const;
    // Line number of data row i for diagnostics (header is line 1).
    std::size_t line_of(std::size_t row) const { return row + 2; }
};

CsvTable read_csv(const std::string& path);
std::vector<std::string> split_csv_line(const std::string& line);

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<std::string>& fields);

private:
    struct Impl;
    Impl* impl_;
};

std::string format_double(double v);

}  // namespace fieldwork
