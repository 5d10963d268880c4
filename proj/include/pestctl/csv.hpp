#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace pestctl {

/// Shortest representation that round-trips a double exactly (17 significant
/// digits).
std::string fmt17(double v);

/// Comma-separated table with '#' comment lines and one header row.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);

    void comment(const std::string& line);
    void header(const std::vector<std::string>& names);
    void row(const std::vector<double>& values);
    void raw_row(const std::vector<std::string>& cells);
    void close();

private:
    std::ofstream out_;
    std::string path_;
};

struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Parse a file written by CsvWriter. Cells that are not numeric parse as NaN.
CsvTable read_csv(const std::string& path);

}  // namespace pestctl
