#include "ssgl/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ssgl {

long CsvTable::column(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == name) return static_cast<long>(j);
    }
    throw Error("column '" + name + "' not found");
}

namespace {

// One record, honoring quotes that may span physical lines. Returns false at
// end of input. `row` tracks the physical line number for error messages.
bool read_record(std::istream& in, std::vector<std::string>& fields,
                 const std::string& path, long& row) {
    fields.clear();
    int c = in.get();
    if (c == EOF) return false;
    ++row;
    std::string field;
    bool quoted = false;
    bool any = false;
    while (true) {
        if (c == EOF) {
            if (quoted) throw CsvError(path, row, "unterminated quoted field");
            fields.push_back(field);
            return true;
        }
        if (quoted) {
            if (c == '"') {
                const int peek = in.peek();
                if (peek == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++row;
                field.push_back(static_cast<char>(c));
            }
        } else if (c == '"') {
            if (!field.empty()) throw CsvError(path, row, "stray quote inside field");
            quoted = true;
            any = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
            any = true;
        } else if (c == '\r') {
            // swallow; CRLF terminates below
        } else if (c == '\n') {
            fields.push_back(field);
            return true;
        } else {
            field.push_back(static_cast<char>(c));
            any = true;
        }
        c = in.get();
    }
    (void)any;
}

} // namespace

CsvTable read_numeric_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError(path, 0, "cannot open file");

    CsvTable table;
    std::vector<std::string> fields;
    long row = 0;

    // header (skipping leading comment lines)
    while (true) {
        if (!read_record(in, fields, path, row)) {
            throw CsvError(path, row, "missing header row");
        }
        if (!fields.empty() && !fields[0].empty() && fields[0][0] == '#') continue;
        break;
    }
    table.header = fields;
    const long ncol = static_cast<long>(fields.size());
    if (ncol == 0) throw CsvError(path, row, "empty header");

    std::vector<double> data;
    long nrow = 0;
    while (read_record(in, fields, path, row)) {
        if (fields.size() == 1 && fields[0].empty()) continue; // trailing blank line
        if (static_cast<long>(fields.size()) != ncol) {
            throw CsvError(path, row,
                           "expected " + std::to_string(ncol) + " fields, got " +
                               std::to_string(fields.size()));
        }
        for (const auto& f : fields) {
            char* end = nullptr;
            const double v = std::strtod(f.c_str(), &end);
            if (f.empty() || end != f.c_str() + f.size()) {
                throw CsvError(path, row, "not a number: '" + f + "'");
            }
            data.push_back(v);
        }
        ++nrow;
    }
    table.values = Matrix(nrow, ncol);
    for (long i = 0; i < nrow; ++i) {
        for (long j = 0; j < ncol; ++j) table.values(i, j) = data[i * ncol + j];
    }
    return table;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& values, const std::vector<std::string>& comments) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    for (const auto& c : comments) out << "# " << c << "\n";
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j) out << ',';
        out << header[j];
    }
    out << "\n";
    for (long i = 0; i < values.rows(); ++i) {
        for (long j = 0; j < values.cols(); ++j) {
            if (j) out << ',';
            out << format_double(values(i, j));
        }
        out << "\n";
    }
}

} // namespace ssgl
