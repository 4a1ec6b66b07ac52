#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace snosc {

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

/// Minimal CSV writer: mandatory header row, full double precision.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& cells);

    bool good() const { return out_.good(); }

private:
    std::ofstream out_;
    std::size_t n_cols_;
};

}  // namespace snosc
