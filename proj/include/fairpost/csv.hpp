#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fairpost {

// Parsed CSV with the header row split off. Cells keep their raw text.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a header column, or -1 when absent.
    int column_index(const std::string& name) const;
};

// RFC 4180: quoted fields, escaped quotes, embedded separators/newlines,
// CRLF or LF line endings. Every record must have the header's field count.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

// Quotes a cell only when needed (separator, quote, or newline present).
std::string csv_escape(const std::string& cell);
void write_csv_row(std::ostream& out, const std::vector<std::string>& cells);

}  // namespace fairpost
