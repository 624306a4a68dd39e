#pragma once

#include <string>
#include <vector>

#include "fabricvision/errors.hpp"

namespace fabricvision {

struct CsvTable {
    std::vector<std::string> header;             // empty when the file has none
    std::vector<std::vector<std::string>> rows;  // data rows, fields trimmed
};

// Minimal comma-separated reader: no quoting, '#' lines skipped, a first
// line containing any non-numeric field is treated as the header.
CsvTable read_csv(const std::string& path);

double parse_double(const std::string& field, const std::string& context);

}  // namespace fabricvision
