// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef CASTID_CSV_HPP_
#define CASTID_CSV_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace castid::csv {

using Row = std::vector<std::string>;

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF tolerated.
// The first row must equal `expected_header` or a ParseError is thrown.
// Returned rows exclude the header; each has header.size() fields.
std::vector<Row> read_file(const std::filesystem::path& path,
                           const std::vector<std::string>& expected_header);

std::vector<Row> parse(std::string_view text);

// Quotes only when the field needs it.
void write_row(std::ostream& os, const Row& row);

// Strict numeric parsing; ParseError names the context on failure.
double to_double(const std::string& field, std::string_view context);
long long to_int(const std::string& field, std::string_view context);

// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace castid::csv

#endif  // CASTID_CSV_HPP_
