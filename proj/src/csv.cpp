#include "fabricvision/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

namespace fabricvision {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(trim(line.substr(start)));
            return fields;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

bool is_numeric(const std::string& s) {
    if (s.empty()) return false;
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

}  // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);

    CsvTable table;
    std::string line;
    bool first_content = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;

        std::vector<std::string> fields = split_fields(line);
        if (first_content) {
            first_content = false;
            const bool any_text = std::any_of(fields.begin(), fields.end(), [](const auto& f) {
                return !f.empty() && !is_numeric(f);
            });
            // Sample-id columns may be non-numeric, so only an all-text row
            // counts as a header.
            const bool all_text = std::all_of(fields.begin(), fields.end(), [](const auto& f) {
                return !is_numeric(f);
            });
            if (any_text && all_text) {
                table.header = std::move(fields);
                continue;
            }
        }
        table.rows.push_back(std::move(fields));
    }
    return table;
}

double parse_double(const std::string& field, const std::string& context) {
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size()) {
        throw FormatError("not a number: '" + field + "' in " + context);
    }
    return v;
}

}  // namespace fabricvision
