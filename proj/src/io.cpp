#include "larx/io.hpp"

#include "larx/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace larx {

namespace {

std::string trim(std::string s)
{
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

int month_index(const Date& d)
{
    return d.year() * 12 + static_cast<int>(d.month()) - 1;
}

int quarter_index(const Date& d)
{
    return d.year() * 4 + static_cast<int>(d.quarter()) - 1;
}

} // namespace

SeriesTable parse_csv(std::istream& in, const std::string& source)
{
    auto fail = [&](std::size_t line, const std::string& what) {
        return Error(Errc::csv_parse, source + ":" + std::to_string(line) + ": " + what);
    };
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty())
            header = split(trim(line));
    }
    if (header.empty())
        throw fail(line_no, "missing header");
    if (header[0] != "date")
        throw fail(line_no, "first header cell must be 'date', found '" + header[0] + "'");
    if (header.size() < 2)
        throw fail(line_no, "no series columns");
    std::set<std::string> seen;
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c].empty())
            throw fail(line_no, "empty series name in column " + std::to_string(c + 1));
        if (!seen.insert(header[c]).second)
            throw fail(line_no, "duplicate series name '" + header[c] + "'");
    }

    SeriesTable t;
    t.names.assign(header.begin() + 1, header.end());
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string row = trim(line);
        if (row.empty())
            continue;
        const auto cells = split(row);
        if (cells.size() != header.size())
            throw fail(line_no, "expected " + std::to_string(header.size()) + " cells, found " + std::to_string(cells.size()));
        Date d;
        try {
            d = Date::parse(cells[0]);
        } catch (const Error&) {
            throw fail(line_no, "cannot parse date '" + cells[0] + "'");
        }
        if (!t.dates.empty()) {
            if (d == t.dates.back())
                throw fail(line_no, "duplicate date " + d.iso());
            if (d < t.dates.back())
                throw fail(line_no, "date " + d.iso() + " is not after " + t.dates.back().iso());
        }
        std::vector<double> values;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            const std::string& cell = cells[c];
            if (cell.empty()) {
                values.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v))
                throw fail(line_no, "cannot parse value '" + cell + "' in column '" + header[c] + "'");
            values.push_back(v);
        }
        t.dates.push_back(d);
        rows.push_back(std::move(values));
    }
    t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            t.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    t.frequency = detect_frequency(t.dates);
    return t;
}

SeriesTable load_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::io, "cannot open " + path.string());
    return parse_csv(in, path.string());
}

Frequency detect_frequency(const std::vector<Date>& dates)
{
    if (dates.size() < 2)
        return Frequency::irregular;
    bool monthly = true, quarterly = true;
    for (std::size_t i = 1; i < dates.size(); ++i) {
        monthly = monthly && month_index(dates[i]) - month_index(dates[i - 1]) == 1;
        quarterly = quarterly && quarter_index(dates[i]) - quarter_index(dates[i - 1]) == 1;
    }
    if (monthly)
        return Frequency::monthly;
    if (quarterly)
        return Frequency::quarterly;
    return Frequency::irregular;
}

SeriesTable align_tables(std::vector<SeriesTable> tables)
{
    if (tables.empty())
        throw Error(Errc::config, "no data files");
    const bool any_quarterly = std::any_of(tables.begin(), tables.end(),
                                           [](const SeriesTable& t) { return t.frequency == Frequency::quarterly; });
    for (auto& t : tables) {
        if (t.frequency == Frequency::quarterly) {
            for (auto& d : t.dates)
                d = d.quarter_end();
        } else if (t.frequency == Frequency::monthly && any_quarterly) {
            t = quarter_end_sample(t);
        }
    }
    if (tables.size() == 1)
        return tables.front();

    std::set<std::string> names;
    std::map<Date, Index> index;
    for (const auto& t : tables) {
        for (const auto& n : t.names)
            if (!names.insert(n).second)
                throw Error(Errc::config, "series '" + n + "' appears in more than one data file");
        for (const auto& d : t.dates)
            index.emplace(d, 0);
    }
    SeriesTable out;
    Index r = 0;
    for (auto& [d, i] : index) {
        i = r++;
        out.dates.push_back(d);
    }
    out.values = MatrixXd::Constant(r, static_cast<Index>(names.size()), std::numeric_limits<double>::quiet_NaN());
    Index col = 0;
    for (const auto& t : tables) {
        for (Index c = 0; c < static_cast<Index>(t.names.size()); ++c, ++col) {
            out.names.push_back(t.names[static_cast<std::size_t>(c)]);
            for (Index s = 0; s < t.rows(); ++s)
                out.values(index.at(t.dates[static_cast<std::size_t>(s)]), col) = t.values(s, c);
        }
    }
    out.frequency = detect_frequency(out.dates);
    return out;
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return {};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& out, const SeriesTable& table)
{
    out << "date";
    for (const auto& n : table.names)
        out << ',' << n;
    out << '\n';
    for (Index r = 0; r < table.rows(); ++r) {
        out << table.dates[static_cast<std::size_t>(r)].iso();
        for (Index c = 0; c < table.values.cols(); ++c)
            out << ',' << format_number(table.values(r, c));
        out << '\n';
    }
}

} // namespace larx
