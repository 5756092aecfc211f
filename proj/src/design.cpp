#include "larx/design.hpp"

#include "larx/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace larx {

namespace chr = std::chrono;

Date::Date(int y, unsigned m, unsigned d) : Date(chr::year_month_day{chr::year{y}, chr::month{m}, chr::day{d}}) {}

Date::Date(chr::year_month_day ymd) : ymd_(ymd)
{
    if (!ymd_.ok())
        throw Error(Errc::domain, "invalid calendar date");
}

Date Date::parse(std::string_view iso)
{
    auto bad = [&] { return Error(Errc::domain, "unparseable date '" + std::string(iso) + "'"); };
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
        throw bad();
    auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        const auto* first = iso.data() + pos;
        const auto [ptr, ec] = std::from_chars(first, first + len, v);
        if (ec != std::errc{} || ptr != first + len)
            throw bad();
        return v;
    };
    const chr::year_month_day ymd{chr::year{num(0, 4)}, chr::month{static_cast<unsigned>(num(5, 2))},
                                  chr::day{static_cast<unsigned>(num(8, 2))}};
    if (!ymd.ok())
        throw bad();
    return Date(ymd);
}

std::string Date::iso() const
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year(), month(), static_cast<unsigned>(ymd_.day()));
    return buf;
}

Date Date::quarter_end() const
{
    const chr::year_month_day_last last{ymd_.year(), chr::month_day_last{chr::month{quarter() * 3}}};
    return Date(chr::year_month_day{last});
}

Index SeriesTable::column(std::string_view name) const
{
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
        throw Error(Errc::unknown_proxy, "unknown series '" + std::string(name) + "'");
    return static_cast<Index>(it - names.begin());
}

bool SeriesTable::has(std::string_view name) const
{
    return std::find(names.begin(), names.end(), name) != names.end();
}

void SeriesTable::validate() const
{
    if (values.rows() != rows() || values.cols() != static_cast<Index>(names.size()))
        throw Error(Errc::structural, "series table shape does not match its dates/names");
    for (std::size_t i = 1; i < dates.size(); ++i)
        if (!(dates[i - 1] < dates[i]))
            throw Error(Errc::structural, "series dates must be strictly ascending at " + dates[i].iso());
}

Layout ModelSpec::layout() const
{
    Layout l;
    l.n = static_cast<Index>(dependent.proxies.size());
    l.va = static_cast<Index>(ar_lags.size());
    for (const auto& g : groups)
        l.groups.push_back({static_cast<Index>(g.proxies.size()), static_cast<Index>(g.lags.size())});
    return l;
}

void ModelSpec::validate() const
{
    if (dependent.proxies.empty())
        throw Error(Errc::config, "dependent needs at least one proxy");
    if (!(dependent.variance_target > 0.0))
        throw Error(Errc::config, "dependent variance target must be positive");
    for (int lag : ar_lags)
        if (lag < 1)
            throw Error(Errc::config, "autoregressive lags must be at least 1");
    for (const auto& g : groups) {
        if (g.proxies.empty())
            throw Error(Errc::config, "group '" + g.name + "' has no proxies");
        if (g.lags.empty())
            throw Error(Errc::config, "group '" + g.name + "' has no versions");
        for (int lag : g.lags)
            if (lag < 0)
                throw Error(Errc::config, "group '" + g.name + "' has a negative lag");
        if (g.constrained_version < 0 || g.constrained_version >= static_cast<int>(g.lags.size()))
            throw Error(Errc::config, "group '" + g.name + "' constrained version out of range");
        if (g.variance_target && !(*g.variance_target > 0.0))
            throw Error(Errc::config, "group '" + g.name + "' variance target must be positive");
    }
    if (solver.max_iter < 1 || !(solver.tol > 0.0))
        throw Error(Errc::config, "solver options out of range");
}

Index ModelSpec::active_multipliers() const
{
    Index count = 1;   // dependent variance is always imposed
    if (dependent.sum_target)
        ++count;
    for (const auto& g : groups)
        count += (g.variance_target ? 1 : 0) + (g.sum_target ? 1 : 0);
    return count;
}

Index ModelSpec::parameter_count() const
{
    const Layout l = layout();
    return l.n + l.omega_size() + l.va + l.beta_size() + 1 + active_multipliers();
}

Dataset make_dataset(MatrixXd y, MatrixXd a, MatrixXd x, const Layout& layout, double half_life,
                     std::vector<Date> dates)
{
    if (y.rows() == 0)
        throw Error(Errc::empty_surviving_sample, "dataset has no rows");
    if (a.rows() != y.rows() || x.rows() != y.rows())
        throw Error(Errc::dimension_mismatch, "Y, A and X row counts differ");
    if (y.cols() != layout.n || a.cols() != layout.a_cols() || x.cols() != layout.x_cols())
        throw Error(Errc::structural, "dataset columns do not match the layout");
    if (!dates.empty() && static_cast<Index>(dates.size()) != y.rows())
        throw Error(Errc::dimension_mismatch, "date count differs from row count");
    Dataset d;
    d.layout = layout;
    d.weights = exp_decay_weights(y.rows(), half_life);
    d.y = std::move(y);
    d.a = std::move(a);
    d.x = std::move(x);
    d.dates = std::move(dates);
    return d;
}

Dataset Dataset::head(Index count, double half_life) const
{
    if (count < 1 || count > rows())
        throw Error(Errc::dimension_mismatch, "head: row count out of range");
    std::vector<Date> d;
    if (!dates.empty())
        d.assign(dates.begin(), dates.begin() + count);
    return make_dataset(y.topRows(count), a.topRows(count), x.topRows(count), layout, half_life, std::move(d));
}

Dataset Dataset::row(Index i) const
{
    std::vector<Date> d;
    if (!dates.empty())
        d.push_back(dates[static_cast<std::size_t>(i)]);
    return make_dataset(y.middleRows(i, 1), a.middleRows(i, 1), x.middleRows(i, 1), layout,
                        std::numeric_limits<double>::infinity(), std::move(d));
}

MomentSet Dataset::moments() const
{
    return build_moment_set(y, a, x, layout, weights);
}

std::vector<double> log_returns(std::span<const double> levels)
{
    if (levels.size() < 2)
        throw Error(Errc::degenerate_sample, "log_returns: need at least 2 levels");
    std::vector<double> out;
    out.reserve(levels.size() - 1);
    for (std::size_t t = 0; t < levels.size(); ++t) {
        if (!(levels[t] > 0.0))
            throw Error(Errc::domain, "log_returns: nonpositive level at position " + std::to_string(t));
        if (t > 0)
            out.push_back(std::log(levels[t] / levels[t - 1]));
    }
    return out;
}

SeriesTable log_returns(const SeriesTable& levels)
{
    levels.validate();
    if (levels.rows() < 2)
        throw Error(Errc::degenerate_sample, "log_returns: need at least 2 rows");
    SeriesTable out;
    out.names = levels.names;
    out.frequency = levels.frequency;
    out.dates.assign(levels.dates.begin() + 1, levels.dates.end());
    out.values.resize(levels.rows() - 1, levels.values.cols());
    for (Index j = 0; j < levels.values.cols(); ++j) {
        for (Index t = 1; t < levels.rows(); ++t) {
            const double p0 = levels.values(t - 1, j);
            const double p1 = levels.values(t, j);
            if ((!std::isnan(p0) && !(p0 > 0.0)) || (!std::isnan(p1) && !(p1 > 0.0)))
                throw Error(Errc::domain, "log_returns: nonpositive level in '" + levels.names[static_cast<std::size_t>(j)] +
                                              "' near " + levels.dates[static_cast<std::size_t>(t)].iso());
            out.values(t - 1, j) = std::log(p1 / p0);   // NaN propagates
        }
    }
    return out;
}

SeriesTable quarter_end_sample(const SeriesTable& monthly)
{
    monthly.validate();
    if (monthly.frequency != Frequency::monthly)
        throw Error(Errc::structural, "quarter_end_sample expects a monthly table");
    SeriesTable out;
    out.names = monthly.names;
    out.frequency = Frequency::quarterly;
    std::vector<Index> keep;
    for (Index t = 0; t < monthly.rows(); ++t) {
        const Date& d = monthly.dates[static_cast<std::size_t>(t)];
        const bool last_in_quarter =
            t + 1 == monthly.rows() || monthly.dates[static_cast<std::size_t>(t + 1)].quarter_end() != d.quarter_end();
        if (last_in_quarter && d.month() % 3 == 0)
            keep.push_back(t);
    }
    out.values.resize(static_cast<Index>(keep.size()), monthly.values.cols());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        out.dates.push_back(monthly.dates[static_cast<std::size_t>(keep[i])].quarter_end());
        out.values.row(static_cast<Index>(i)) = monthly.values.row(keep[i]);
    }
    return out;
}

MatrixXd build_versions(const MatrixXd& series, std::span<const int> lags)
{
    if (lags.empty())
        return MatrixXd(series.rows(), 0);
    int max_lag = 0;
    for (int lag : lags) {
        if (lag < 0)
            throw Error(Errc::domain, "build_versions: negative lag");
        max_lag = std::max(max_lag, lag);
    }
    if (max_lag >= series.rows())
        throw Error(Errc::insufficient_history, "build_versions: lag " + std::to_string(max_lag) +
                                                    " needs more than " + std::to_string(series.rows()) + " rows");
    const Index rows = series.rows() - max_lag;
    const Index m = series.cols();
    MatrixXd out(rows, m * static_cast<Index>(lags.size()));
    for (std::size_t v = 0; v < lags.size(); ++v)
        out.middleCols(static_cast<Index>(v) * m, m) = series.middleRows(max_lag - lags[v], rows);
    return out;
}

Dataset assemble_dataset(const ModelSpec& spec, const SeriesTable& table)
{
    spec.validate();
    table.validate();
    const Layout layout = spec.layout();

    std::vector<Index> ycols;
    for (const auto& p : spec.dependent.proxies)
        ycols.push_back(table.column(p));
    std::vector<std::vector<Index>> gcols;
    for (const auto& g : spec.groups) {
        auto& cols = gcols.emplace_back();
        for (const auto& p : g.proxies)
            cols.push_back(table.column(p));
    }

    int max_lag = 0;
    for (int lag : spec.ar_lags)
        max_lag = std::max(max_lag, lag);
    for (const auto& g : spec.groups)
        for (int lag : g.lags)
            max_lag = std::max(max_lag, lag);

    auto in_outlier = [&](Index t) {
        const Date& d = table.dates[static_cast<std::size_t>(t)];
        return std::any_of(spec.sample.outliers.begin(), spec.sample.outliers.end(),
                           [&](const DateWindow& w) { return w.contains(d); });
    };
    auto present = [&](Index t, const std::vector<Index>& cols) {
        return std::none_of(cols.begin(), cols.end(), [&](Index c) { return std::isnan(table.values(t, c)); });
    };

    std::vector<Index> rows;
    for (Index t = max_lag; t < table.rows(); ++t) {
        bool ok = present(t, ycols) && !in_outlier(t);
        for (int lag : spec.ar_lags)
            ok = ok && present(t - lag, ycols) && !in_outlier(t - lag);
        for (std::size_t j = 0; j < spec.groups.size() && ok; ++j)
            for (int lag : spec.groups[j].lags)
                ok = ok && present(t - lag, gcols[j]) && !in_outlier(t - lag);
        if (ok)
            rows.push_back(t);
    }
    if (rows.empty())
        throw Error(Errc::empty_surviving_sample, "no rows survive alignment and outlier removal");

    const Index s = static_cast<Index>(rows.size());
    MatrixXd y(s, layout.n), a(s, layout.a_cols()), x(s, layout.x_cols());
    std::vector<Date> dates;
    for (Index r = 0; r < s; ++r) {
        const Index t = rows[static_cast<std::size_t>(r)];
        dates.push_back(table.dates[static_cast<std::size_t>(t)]);
        for (Index i = 0; i < layout.n; ++i)
            y(r, i) = table.values(t, ycols[static_cast<std::size_t>(i)]);
        for (Index v = 0; v < layout.va; ++v)
            for (Index i = 0; i < layout.n; ++i)
                a(r, v * layout.n + i) = table.values(t - spec.ar_lags[static_cast<std::size_t>(v)], ycols[static_cast<std::size_t>(i)]);
        for (Index j = 0; j < layout.k(); ++j) {
            const auto& g = spec.groups[static_cast<std::size_t>(j)];
            const auto& cols = gcols[static_cast<std::size_t>(j)];
            for (Index v = 0; v < static_cast<Index>(g.lags.size()); ++v) {
                const Index off = layout.x_offset(j, v);
                for (std::size_t i = 0; i < cols.size(); ++i)
                    x(r, off + static_cast<Index>(i)) = table.values(t - g.lags[static_cast<std::size_t>(v)], cols[i]);
            }
        }
    }
    return make_dataset(std::move(y), std::move(a), std::move(x), layout, spec.sample.half_life, std::move(dates));
}

} // namespace larx
