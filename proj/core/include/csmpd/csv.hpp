#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace csmpd {

/// %.12g rendering used for every numeric cell, so output is byte-stable
/// across runs and platforms.
std::string format_number(double v);

/// RFC-4180 writer: CRLF row terminators, cells quoted only when they
/// contain a comma, quote, or line break.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void row(const std::vector<std::string>& cells);
    void numeric_row(const std::vector<double>& cells);

private:
    std::ostream& out_;
};

} // namespace csmpd
