#include "fairpost/csv.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fairpost/errors.hpp"

namespace fairpost {

int CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

namespace {

// Reads one record, honoring quotes. Returns false on clean EOF before any data.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string cell;
    bool in_quotes = false;
    bool saw_any = false;
    int c;
    while ((c = in.get()) != EOF) {
        saw_any = true;
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get();
                    cell.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                cell.push_back(ch);
            }
        } else if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cell));
            cell.clear();
        } else if (ch == '\n') {
            if (!cell.empty() && cell.back() == '\r') cell.pop_back();
            fields.push_back(std::move(cell));
            return true;
        } else {
            cell.push_back(ch);
        }
    }
    if (in_quotes) throw DataError("csv: unterminated quoted field");
    if (!saw_any) return false;
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    fields.push_back(std::move(cell));
    return true;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    if (!read_record(in, table.header) || table.header.empty()) {
        throw DataError("csv: missing header row");
    }
    std::vector<std::string> fields;
    std::size_t line = 1;
    while (read_record(in, fields)) {
        ++line;
        if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
        if (fields.size() != table.header.size()) {
            throw DataError("csv: record " + std::to_string(line) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(table.header.size()));
        }
        table.rows.push_back(fields);
    }
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    return read_csv(in);
}

std::string csv_escape(const std::string& cell) {
    bool needs_quotes = cell.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return cell;
    std::string out = "\"";
    for (char ch : cell) {
        if (ch == '"') out += "\"\"";
        else out.push_back(ch);
    }
    out += "\"";
    return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out << ',';
        out << csv_escape(cells[i]);
    }
    out << '\n';
}

}  // namespace fairpost
