#pragma once

#include "larx/design.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace larx {

// Header `date,<name>,...`; ISO dates ascending; empty cells are missing (NaN).
SeriesTable load_csv(const std::filesystem::path& path);
SeriesTable parse_csv(std::istream& in, const std::string& source);

// Monthly for consecutive calendar months, quarterly for consecutive calendar quarters.
Frequency detect_frequency(const std::vector<Date>& dates);

// Quarterly tables keyed by quarter-end dates; monthly tables reduced to quarter ends
// when any table is quarterly. Columns are outer-joined on dates.
SeriesTable align_tables(std::vector<SeriesTable> tables);

// %.17g; NaN as an empty string.
std::string format_number(double v);

void write_csv(std::ostream& out, const SeriesTable& table);

} // namespace larx
