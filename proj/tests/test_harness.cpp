#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "larx/error.hpp"
#include "larx/harness.hpp"
#include "support.hpp"

#include <array>
#include <cmath>

using namespace larx;
using testsupport::correlation;
using testsupport::gaussian;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

ModelSpec latent_spec(int n, std::vector<int> ar_lags, std::vector<std::pair<int, std::vector<int>>> groups)
{
    ModelSpec s;
    for (int i = 0; i < n; ++i)
        s.dependent.proxies.push_back("y" + std::to_string(i));
    s.ar_lags = std::move(ar_lags);
    for (std::size_t j = 0; j < groups.size(); ++j) {
        GroupSpec g;
        g.name = "g" + std::to_string(j);
        for (int i = 0; i < groups[j].first; ++i)
            g.proxies.push_back(g.name + "x" + std::to_string(i));
        g.lags = groups[j].second;
        s.groups.push_back(g);
    }
    s.solver.max_iter = 2000;
    return s;
}

Errc error_code(auto&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return Errc::io;
}

double recovery(const ModelSpec& spec, double noise, std::uint64_t seed, Index rows = 500)
{
    SynthParams p;
    p.rows = rows;
    const SynthOutput out = synth_generate(spec, p, noise, seed);
    const Dataset data = assemble_dataset(spec, out.table);
    const FitResult f = fit(data, spec);
    return std::abs(correlation(data.y * f.w, out.truth.latent_y.tail(data.rows())));
}

} // namespace

TEST_CASE("naive benchmark")
{
    CHECK(naive_benchmark(VectorXd::Constant(5, 2.5), exp_decay_weights(5, 3.0)) == doctest::Approx(2.5));
    CHECK(naive_benchmark(Eigen::Vector2d(1.0, 3.0), exp_decay_weights(2, inf)) == doctest::Approx(2.0));
    std::mt19937_64 rng(1);
    const VectorXd h = gaussian(rng, 30, 1).col(0);
    const WeightVector w = exp_decay_weights(30, 7.0);
    CHECK(naive_benchmark(h, w) == doctest::Approx(weighted_mean(h, w)(0)).epsilon(1e-14));
    CHECK(error_code([] { naive_benchmark(VectorXd(0), WeightVector()); }) == Errc::empty_sample);
}

TEST_CASE("OOS R-squared")
{
    std::mt19937_64 rng(2);
    std::vector<ForecastRecord> recs(20);
    for (auto& r : recs) {
        const VectorXd v = gaussian(rng, 3, 1).col(0);
        r.actual = v(0);
        r.forecast = v(0) + 0.3 * v(1);
        r.benchmark = v(2);
    }
    auto perfect = recs, naive = recs;
    for (auto& r : perfect)
        r.forecast = r.actual;
    for (auto& r : naive)
        r.forecast = r.benchmark;
    CHECK(oos_r2(perfect) == doctest::Approx(1.0));
    CHECK(std::abs(oos_r2(naive)) <= 1e-15);

    auto affine = recs;
    for (auto& r : affine) {
        r.actual = 3.0 * r.actual - 7.0;
        r.forecast = 3.0 * r.forecast - 7.0;
        r.benchmark = 3.0 * r.benchmark - 7.0;
    }
    CHECK(oos_r2(affine) == doctest::Approx(oos_r2(recs)).epsilon(1e-12));

    // Skipped records are excluded from both sums.
    auto with_skip = recs;
    with_skip[4].skipped = true;
    with_skip[4].forecast = 1e6;
    auto without = recs;
    without.erase(without.begin() + 4);
    CHECK(oos_r2(with_skip) == doctest::Approx(oos_r2(without)).epsilon(1e-14));

    auto flat = recs;
    for (auto& r : flat)
        r.benchmark = r.actual;
    CHECK(error_code([&] { oos_r2(flat); }) == Errc::undefined_metric);
    CHECK(error_code([&] { oos_r2({recs[0]}); }) == Errc::undefined_metric);
}

TEST_CASE("synthetic generator is deterministic and well formed")
{
    const ModelSpec spec = latent_spec(3, {1, 2}, {{3, {0, 1}}, {2, {1}}});
    SynthParams p;
    p.rows = 120;
    const SynthOutput a = synth_generate(spec, p, 0.01, 7);
    const SynthOutput b = synth_generate(spec, p, 0.01, 7);
    const SynthOutput c = synth_generate(spec, p, 0.01, 8);
    CHECK(a.table.values == b.table.values);
    CHECK(a.table.dates == b.table.dates);
    CHECK(a.table.values != c.table.values);
    CHECK(a.table.rows() == 120);
    CHECK(a.table.names.size() == 8);
    CHECK(a.table.dates.front() == Date(1990, 3, 31));
    CHECK(a.table.dates[4] == Date(1991, 3, 31));
    CHECK(a.table.dates[5] == Date(1991, 6, 30));
    CHECK_NOTHROW(a.table.validate());

    // Latent weights use more than one proxy.
    CHECK((a.truth.w.array().abs() > 1e-8).count() >= 2);
    for (Index j = 0; j < a.truth.omega.blocks(); ++j)
        CHECK((a.truth.omega.block(j).array().abs() > 1e-8).count() >= 2);

    // Without noise the true weights reproduce the latent series.
    const SynthOutput clean = synth_generate(spec, p, 0.0, 3);
    const VectorXd rebuilt = clean.table.values.leftCols(3) * clean.truth.w;
    CHECK((rebuilt - clean.truth.latent_y).cwiseAbs().maxCoeff() <= 1e-10);
    const VectorXd xrebuilt = clean.table.values.middleCols(3, 3) * clean.truth.omega.block(0);
    CHECK((xrebuilt - clean.truth.latent_x.col(0)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("synthetic generator rejects unstable autoregression")
{
    const ModelSpec spec = latent_spec(2, {1, 2}, {{2, {0}}});
    SynthParams p;
    p.phi = Eigen::Vector2d(0.7, 0.4);
    CHECK(error_code([&] { synth_generate(spec, p, 0.0, 1); }) == Errc::unstable_process);
    p.phi = Eigen::Vector2d(1.2, -0.3);   // companion roots 0.85 and 0.35
    CHECK_NOTHROW(synth_generate(spec, p, 0.0, 1));
}

TEST_CASE("noiseless static model is recovered exactly")
{
    const ModelSpec spec = latent_spec(3, {}, {{3, {0}}});
    CHECK(recovery(spec, 0.0, 11) >= 1.0 - 1e-8);
}

TEST_CASE("explanatory weights are recovered up to scale")
{
    const ModelSpec spec = latent_spec(3, {1}, {{4, {0, 1}}});
    double gap = 0.0;
    const int seeds = 20;
    for (int seed = 0; seed < seeds; ++seed) {
        SynthParams p;
        const SynthOutput out = synth_generate(spec, p, 0.01, static_cast<std::uint64_t>(seed));
        const FitResult f = fit(assemble_dataset(spec, out.table), spec);
        const VectorXd truth = out.truth.omega.block(0).normalized();
        VectorXd est = f.omega.block(0).normalized();
        if (est.dot(truth) < 0.0)
            est = -est;
        gap += (est - truth).cwiseAbs().maxCoeff();
    }
    CHECK(gap / seeds <= 1e-2);
}

TEST_CASE("synthetic recovery improves as noise shrinks")
{
    const ModelSpec spec = latent_spec(3, {1}, {{3, {0, 1}}});
    const std::array<double, 4> noise{0.1, 0.01, 0.001, 0.0};
    std::vector<double> mean;
    for (double sd : noise) {
        double total = 0.0;
        for (int seed = 0; seed < 20; ++seed)
            total += recovery(spec, sd, static_cast<std::uint64_t>(100 + seed));
        mean.push_back(total / 20.0);
    }
    for (std::size_t i = 1; i < mean.size(); ++i)
        CHECK(mean[i] >= mean[i - 1]);
    CHECK(mean[1] >= 0.99);
    CHECK(mean[2] >= 0.999);
    CHECK(mean[3] >= 0.9999);
}

TEST_CASE("non-latent rolling forecasts equal rolling weighted OLS")
{
    const ModelSpec base = latent_spec(1, {1, 2}, {{1, {0, 1, 2, 3}}});
    ModelSpec spec = base;
    spec.sample.half_life = 40.0;
    spec.sample.min_dof = 20;
    SynthParams p;
    p.rows = 90;
    const SynthOutput out = synth_generate(spec, p, 0.3, 5);
    const ForecastRun run = rolling_oos_forecast(out.table, spec, "baseline");
    const Dataset data = assemble_dataset(spec, out.table);
    REQUIRE(run.records.size() == static_cast<std::size_t>(data.rows()));
    int compared = 0;
    for (Index i = 0; i < data.rows(); ++i) {
        const ForecastRecord& r = run.records[static_cast<std::size_t>(i)];
        CHECK(r.date == data.dates[static_cast<std::size_t>(i)]);
        if (r.dof < spec.sample.min_dof) {
            CHECK(r.skipped);
            CHECK_FALSE(r.reason.empty());
            continue;
        }
        REQUIRE_FALSE(r.skipped);
        MatrixXd reg(i, data.a.cols() + data.x.cols());
        reg << data.a.topRows(i), data.x.topRows(i);
        const WeightVector w = exp_decay_weights(i, spec.sample.half_life);
        const auto ols = testsupport::wls(data.y.col(0).head(i), reg, w.values());
        VectorXd next(reg.cols());
        next << data.a.row(i).transpose(), data.x.row(i).transpose();
        CHECK(std::abs(r.forecast - (ols.intercept + next.dot(ols.slopes))) <= 1e-8);
        CHECK(r.actual == doctest::Approx(data.y(i, 0)).epsilon(1e-12));
        CHECK(r.benchmark == doctest::Approx(w.values().dot(data.y.col(0).head(i))).epsilon(1e-12));
        ++compared;
    }
    CHECK(compared >= 40);
    REQUIRE(run.oos_r2.has_value());
    CHECK(*run.oos_r2 == doctest::Approx(oos_r2(run.records)));
}

TEST_CASE("forecast start and degrees of freedom")
{
    ModelSpec spec = latent_spec(2, {1}, {{2, {0}}});
    SynthParams p;
    p.rows = 80;
    const SynthOutput out = synth_generate(spec, p, 0.05, 9);
    spec.sample.forecast_start = Date(1995, 3, 31);
    const ForecastRun run = rolling_oos_forecast(out.table, spec);
    CHECK(run.records.front().date == Date(1995, 3, 31));
    const Index params = spec.parameter_count();
    for (const auto& r : run.records) {
        CHECK(r.dof == r.history_rows - params);
        if (r.dof < spec.sample.min_dof) {
            CHECK(r.skipped);
            CHECK(r.reason.find("degrees of freedom") != std::string::npos);
        }
    }
    CHECK(run.records.front().skipped);
    CHECK(run.usable() > 0);

    spec.sample.forecast_start = Date(2030, 3, 31);
    CHECK(error_code([&] { rolling_oos_forecast(out.table, spec); }) == Errc::config);
    spec.sample.forecast_start.reset();
    spec.sample.min_dof = 1000;
    CHECK(error_code([&] { rolling_oos_forecast(out.table, spec); }) == Errc::empty_run);
}

TEST_CASE("correctly specified model beats the benchmark out of sample")
{
    ModelSpec spec = latent_spec(3, {1}, {{3, {1}}});
    spec.sample.min_dof = 40;
    SynthParams p;
    p.rows = 300;
    p.phi = VectorXd::Constant(1, 0.6);
    const SynthOutput out = synth_generate(spec, p, 0.1, 21);
    const ForecastRun run = rolling_oos_forecast(out.table, spec);
    REQUIRE(run.oos_r2.has_value());
    CHECK(*run.oos_r2 > 0.0);
}

TEST_CASE("PCA redundancy")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const MatrixXd x = gaussian(rng, 60, 5);
        const VectorXd w = gaussian(rng, 5, 1).col(0);
        CHECK(pca_redundancy_check(x, w));
        const MatrixXd q = Eigen::HouseholderQR<MatrixXd>(gaussian(rng, 5, 5)).householderQ();
        CHECK(pca_redundancy_check(x, w, q));
        const MatrixXd truncated = q.leftCols(3);
        CHECK_FALSE(pca_redundancy_check(x, w, truncated));
    }
    MatrixXd dup = gaussian(rng, 30, 3);
    dup.col(2) = dup.col(0) + dup.col(1);
    CHECK(error_code([&] { pca_redundancy_check(dup, VectorXd::Ones(3)); }) == Errc::rank_deficient);
}
