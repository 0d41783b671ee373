#pragma once

#include <string>
#include <vector>

#include "ssgl/errors.hpp"
#include "ssgl/grouped_design.hpp"

namespace ssgl {

/// CSV problem with the 1-based row number where it occurred.
class CsvError : public Error {
public:
    CsvError(std::string file, long row, const std::string& msg)
        : Error(file + ":" + std::to_string(row) + ": " + msg),
          path(std::move(file)), row_number(row) {}
    std::string path;
    long row_number;
};

struct CsvTable {
    std::vector<std::string> header;
    Matrix values; ///< rows x header.size()

    long column(const std::string& name) const; ///< throws when missing
};

/// Strict RFC-4180 reader for numeric tables with a header row. Quoted
/// fields, embedded separators/newlines and "" escapes are handled; lines
/// starting with '#' before the header are skipped (provenance comments).
CsvTable read_numeric_csv(const std::string& path);

/// Writes a numeric table; floats are printed with 17 significant digits.
/// `comments` become '#'-prefixed lines above the header.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& values, const std::vector<std::string>& comments = {});

/// 17-significant-digit text form used across CSV artifacts.
std::string format_double(double v);

} // namespace ssgl
