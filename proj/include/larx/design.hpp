#pragma once

#include "larx/layout.hpp"
#include "larx/moments.hpp"

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace larx {

class Date {
public:
    Date() = default;
    Date(int y, unsigned m, unsigned d);
    explicit Date(std::chrono::year_month_day ymd);

    static Date parse(std::string_view iso);   // YYYY-MM-DD
    std::string iso() const;

    int year() const noexcept { return static_cast<int>(ymd_.year()); }
    unsigned month() const noexcept { return static_cast<unsigned>(ymd_.month()); }
    unsigned quarter() const noexcept { return (month() - 1) / 3 + 1; }
    Date quarter_end() const;

    auto operator<=>(const Date&) const = default;

private:
    std::chrono::year_month_day ymd_{std::chrono::year{1970}, std::chrono::month{1}, std::chrono::day{1}};
};

enum class Frequency { quarterly, monthly, irregular };

// Dates ascending; values has one row per date and one column per name; NaN marks missing cells.
struct SeriesTable {
    std::vector<Date> dates;
    std::vector<std::string> names;
    MatrixXd values;
    Frequency frequency = Frequency::irregular;

    Index rows() const noexcept { return static_cast<Index>(dates.size()); }
    Index column(std::string_view name) const;   // throws unknown_proxy
    bool has(std::string_view name) const;
    void validate() const;
};

struct DateWindow {
    Date from;
    Date to;   // inclusive
    bool contains(const Date& d) const noexcept { return from <= d && d <= to; }
};

struct DependentSpec {
    std::vector<std::string> proxies;
    double variance_target = 1.0;
    std::optional<double> sum_target;
};

struct GroupSpec {
    std::string name;
    std::vector<std::string> proxies;
    std::vector<int> lags{0};
    std::optional<double> variance_target;
    std::optional<double> sum_target;
    int constrained_version = 0;   // index into lags
};

struct SolverOptions {
    int max_iter = 500;
    double tol = 1e-10;
    double objective_tol = 1e-12;
    std::uint64_t seed = 0;
};

struct SampleOptions {
    double half_life = std::numeric_limits<double>::infinity();
    int min_dof = 40;
    std::vector<DateWindow> outliers;
    std::optional<Date> forecast_start;
};

struct ModelSpec {
    DependentSpec dependent;
    std::vector<int> ar_lags;
    std::vector<GroupSpec> groups;
    SolverOptions solver;
    SampleOptions sample;

    Layout layout() const;
    void validate() const;
    // n + Σm_j + V_a + ΣV_j + 1 + active multipliers
    Index parameter_count() const;
    Index active_multipliers() const;
};

struct Dataset {
    Layout layout;
    MatrixXd y, a, x;
    WeightVector weights;
    std::vector<Date> dates;

    Index rows() const noexcept { return y.rows(); }
    // First `count` rows with decay weights recomputed on them.
    Dataset head(Index count, double half_life) const;
    Dataset row(Index i) const;
    MomentSet moments() const;
};

Dataset make_dataset(MatrixXd y, MatrixXd a, MatrixXd x, const Layout& layout, double half_life,
                     std::vector<Date> dates = {});

std::vector<double> log_returns(std::span<const double> levels);
SeriesTable log_returns(const SeriesTable& levels);

SeriesTable quarter_end_sample(const SeriesTable& monthly);

// Column block per lag τ holding values at t-τ; s - max(lags) rows survive.
MatrixXd build_versions(const MatrixXd& series, std::span<const int> lags);

Dataset assemble_dataset(const ModelSpec& spec, const SeriesTable& table);

} // namespace larx
