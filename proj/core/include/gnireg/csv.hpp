#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gnireg {

// Shortest round-trip decimal form; "nan"/"inf"/"-inf" for non-finite values.
std::string format_double(double v);

// Writes one comma-separated row followed by '\n'.
void write_csv_row(std::ostream& out, const std::vector<std::string>& cells);

}  // namespace gnireg
