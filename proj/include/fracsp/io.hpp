#pragma once

// Persistence: locale-independent shortest round-trip number formatting,
// RFC 4180 CSV tables and raw little-endian field dumps with a JSON sidecar.

#include <string>
#include <vector>

#include "fracsp/grid.hpp"

namespace fracsp {

// Shortest decimal string that parses back to the same double; "nan",
// "inf" and "-inf" for non-finite values.
std::string format_double(double x);

// Quotes a CSV cell when it contains a comma, quote or line break.
std::string csv_escape(const std::string& cell);

// Header plus rows, CRLF line endings.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Writes base + ".f64" (samples as little-endian doubles, x fastest) and
// base + ".json" ({"n", "L", "order", "dtype"}).
void write_field(const std::string& base, const Field& u);
Field read_field(const std::string& base);
// Raw little-endian doubles for grid g; the file size must match exactly.
Field read_raw_field(const std::string& path, const Grid& g);

void write_text(const std::string& path, const std::string& text);

}  // namespace fracsp
