#include "larx/harness.hpp"

#include "larx/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace larx {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::size_t at(Index i)
{
    return static_cast<std::size_t>(i);
}

Date quarter_end_after(Date start, Index quarters)
{
    const Index months = static_cast<Index>(start.month()) - 1 + 3 * quarters;
    return Date(start.year() + static_cast<int>(months / 12), static_cast<unsigned>(months % 12) + 1, 1).quarter_end();
}

struct Mixing {
    MatrixXd m;        // observed = [latent, nuisance...] · m'
    VectorXd weights;  // observed · weights = latent
};

// Well-conditioned mixing whose latent weights are not a multiple of a basis vector.
Mixing draw_mixing(std::mt19937_64& rng, Index size)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    for (;;) {
        MatrixXd m(size, size);
        for (Index j = 0; j < size; ++j)
            for (Index i = 0; i < size; ++i)
                m(i, j) = normal(rng) + (i == j ? 1.0 : 0.0);
        const Eigen::JacobiSVD<MatrixXd> svd(m);
        const VectorXd sv = svd.singularValues();
        if (sv(size - 1) <= 0.0 || sv(0) / sv(size - 1) > 50.0)
            continue;
        const VectorXd w = m.transpose().fullPivLu().solve(VectorXd::Unit(size, 0));
        const double top = w.cwiseAbs().maxCoeff();
        const auto nonzero = (w.array().abs() > 0.05 * top).count();
        if (size == 1 || nonzero >= 2)
            return {m, w};
    }
}

void check_stability(const ModelSpec& spec, const VectorXd& phi)
{
    if (phi.size() == 0)
        return;
    const int order = *std::max_element(spec.ar_lags.begin(), spec.ar_lags.end());
    MatrixXd companion = MatrixXd::Zero(order, order);
    for (Index v = 0; v < phi.size(); ++v)
        companion(0, spec.ar_lags[at(v)] - 1) += phi(v);
    if (order > 1)
        companion.bottomLeftCorner(order - 1, order - 1).setIdentity();
    const double radius = Eigen::EigenSolver<MatrixXd>(companion, false).eigenvalues().cwiseAbs().maxCoeff();
    if (radius >= 1.0)
        throw Error(Errc::unstable_process,
                    "autoregressive coefficients have spectral radius " + std::to_string(radius));
}

} // namespace

Index ForecastRun::usable() const
{
    return static_cast<Index>(std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.skipped; }));
}

double naive_benchmark(const VectorXd& history, const WeightVector& weights)
{
    if (history.size() == 0)
        throw Error(Errc::empty_sample, "benchmark needs a nonempty history");
    if (weights.size() != history.size())
        throw Error(Errc::dimension_mismatch, "benchmark history and weights differ in length");
    return weights.values().dot(history);
}

double oos_r2(const std::vector<ForecastRecord>& records)
{
    double sse_model = 0.0, sse_bench = 0.0;
    Index used = 0;
    for (const auto& r : records) {
        if (r.skipped)
            continue;
        sse_model += (r.actual - r.forecast) * (r.actual - r.forecast);
        sse_bench += (r.actual - r.benchmark) * (r.actual - r.benchmark);
        ++used;
    }
    if (used < 2)
        throw Error(Errc::undefined_metric, "OOS R-squared needs at least 2 forecasts");
    if (!(sse_bench > 0.0))
        throw Error(Errc::undefined_metric, "benchmark squared error is zero");
    return 1.0 - sse_model / sse_bench;
}

ForecastRun rolling_oos_forecast(const SeriesTable& table, const ModelSpec& spec, std::string label)
{
    const Dataset data = assemble_dataset(spec, table);
    const Constraints cons = Constraints::from_spec(spec);
    const Index params = spec.parameter_count();

    Index first = 0;
    if (spec.sample.forecast_start) {
        const auto it = std::lower_bound(data.dates.begin(), data.dates.end(), *spec.sample.forecast_start);
        if (it == data.dates.end())
            throw Error(Errc::config, "forecast_start " + spec.sample.forecast_start->iso() + " is after the last usable date");
        first = static_cast<Index>(it - data.dates.begin());
    }

    ForecastRun run;
    run.label = std::move(label);
    for (Index i = first; i < data.rows(); ++i) {
        ForecastRecord rec;
        rec.date = data.dates[at(i)];
        rec.history_rows = i;
        rec.dof = i - params;
        auto skip = [&](std::string reason) {
            rec.skipped = true;
            rec.reason = std::move(reason);
            rec.actual = rec.forecast = rec.benchmark = std::numeric_limits<double>::quiet_NaN();
        };
        if (rec.dof < spec.sample.min_dof) {
            skip("degrees of freedom " + std::to_string(rec.dof) + " below " + std::to_string(spec.sample.min_dof));
            run.records.push_back(std::move(rec));
            continue;
        }
        try {
            const Dataset history = data.head(i, spec.sample.half_life);
            const FitResult f = fit(history, cons, spec.solver);
            rec.iterations = f.iterations;
            if (!f.converged) {
                skip("solver did not converge");
            } else {
                const Prediction p = predict(f, data.row(i));
                const double scale = data.layout.n == 1 ? f.w(0) : 1.0;
                rec.actual = p.latent(0) / scale;
                rec.forecast = p.fitted(0) / scale;
                rec.benchmark = naive_benchmark(history.y * f.w / scale, history.weights);
            }
        } catch (const Error& e) {
            skip(std::string(code_name(e.code())) + ": " + e.what());
        }
        run.records.push_back(std::move(rec));
    }
    if (run.usable() == 0)
        throw Error(Errc::empty_run, "no window produced a forecast");
    if (run.usable() >= 2)
        run.oos_r2 = oos_r2(run.records);
    return run;
}

SynthOutput synth_generate(const ModelSpec& spec, const SynthParams& params, double noise_sd, std::uint64_t seed)
{
    spec.validate();
    if (params.rows < 1 || params.burn_in < 0)
        throw Error(Errc::config, "synthetic sample needs at least one row");
    if (!(noise_sd >= 0.0))
        throw Error(Errc::config, "noise_sd must be nonnegative");
    const Layout layout = spec.layout();
    {
        std::set<std::string> seen;
        auto claim = [&](const std::string& p) {
            if (!seen.insert(p).second)
                throw Error(Errc::config, "proxy '" + p + "' appears in more than one block");
        };
        for (const auto& p : spec.dependent.proxies)
            claim(p);
        for (const auto& g : spec.groups)
            for (const auto& p : g.proxies)
                claim(p);
    }

    VectorXd phi = params.phi.value_or(VectorXd::Constant(layout.va, layout.va > 0 ? 0.5 / static_cast<double>(layout.va) : 0.0));
    if (phi.size() != layout.va)
        throw Error(Errc::config, "phi needs one entry per autoregressive lag");
    check_stability(spec, phi);

    std::vector<VectorXd> beta;
    if (params.beta) {
        beta = *params.beta;
        if (static_cast<Index>(beta.size()) != layout.k())
            throw Error(Errc::config, "beta needs one vector per group");
    } else {
        for (Index j = 0; j < layout.k(); ++j) {
            VectorXd b(layout.groups[at(j)].versions);
            for (Index v = 0; v < b.size(); ++v)
                b(v) = (j % 2 == 0 ? 0.8 : -0.8) * std::pow(0.6, static_cast<double>(v));
            beta.push_back(b);
        }
    }
    for (Index j = 0; j < layout.k(); ++j)
        if (beta[at(j)].size() != layout.groups[at(j)].versions)
            throw Error(Errc::config, "beta for group " + std::to_string(j) + " needs one entry per version");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Index total = params.burn_in + params.rows;

    MatrixXd latent_x = MatrixXd::Zero(total, layout.k());
    for (Index j = 0; j < layout.k(); ++j)
        for (Index t = 0; t < total; ++t)
            latent_x(t, j) = (t > 0 ? params.factor_persistence * latent_x(t - 1, j) : 0.0) + normal(rng);

    VectorXd latent_y = VectorXd::Zero(total);
    for (Index t = 0; t < total; ++t) {
        double v = params.c + noise_sd * normal(rng);
        for (Index a = 0; a < layout.va; ++a) {
            const Index lag = spec.ar_lags[at(a)];
            if (t >= lag)
                v += phi(a) * latent_y(t - lag);
        }
        for (Index j = 0; j < layout.k(); ++j) {
            const auto& lags = spec.groups[at(j)].lags;
            for (std::size_t q = 0; q < lags.size(); ++q)
                if (t >= lags[q])
                    v += beta[at(j)](static_cast<Index>(q)) * latent_x(t - lags[q], j);
        }
        latent_y(t) = v;
    }

    // Observed block = [latent, independent nuisance] · M' + measurement noise.
    auto observe = [&](const VectorXd& latent, Index size, VectorXd& weights) {
        const Mixing mix = draw_mixing(rng, size);
        MatrixXd z(total, size);
        z.col(0) = latent;
        for (Index i = 1; i < size; ++i)
            for (Index t = 0; t < total; ++t)
                z(t, i) = normal(rng);
        MatrixXd obs = z * mix.m.transpose();
        for (Index i = 0; i < size; ++i)
            for (Index t = 0; t < total; ++t)
                obs(t, i) += noise_sd * normal(rng);
        weights = mix.weights;
        return MatrixXd(obs.bottomRows(params.rows));
    };

    SynthOutput out;
    SynthTruth& truth = out.truth;
    SeriesTable& table = out.table;
    std::vector<MatrixXd> blocks;
    blocks.push_back(observe(latent_y, layout.n, truth.w));
    VectorXd omega(layout.omega_size());
    for (Index j = 0, off = 0; j < layout.k(); ++j) {
        VectorXd w;
        blocks.push_back(observe(latent_x.col(j), layout.groups[at(j)].m, w));
        omega.segment(off, w.size()) = w;
        off += w.size();
    }
    truth.omega = BlockVec(omega, layout.omega_structure());
    VectorXd beta_flat(layout.beta_size());
    for (Index j = 0, off = 0; j < layout.k(); ++j) {
        beta_flat.segment(off, beta[at(j)].size()) = beta[at(j)];
        off += beta[at(j)].size();
    }
    truth.beta = BlockVec(beta_flat, layout.beta_structure());
    truth.phi = phi;
    truth.c = params.c;
    truth.noise_sd = noise_sd;
    truth.seed = seed;
    truth.latent_y = latent_y.tail(params.rows);
    truth.latent_x = latent_x.bottomRows(params.rows);

    table.frequency = Frequency::quarterly;
    for (Index t = 0; t < params.rows; ++t)
        table.dates.push_back(quarter_end_after(Date(1990, 3, 31), t));
    table.names = spec.dependent.proxies;
    for (const auto& g : spec.groups)
        table.names.insert(table.names.end(), g.proxies.begin(), g.proxies.end());
    table.values.resize(params.rows, static_cast<Index>(table.names.size()));
    for (Index col = 0; const auto& b : blocks) {
        table.values.middleCols(col, b.cols()) = b;
        col += b.cols();
    }
    return out;
}

bool pca_redundancy_check(const MatrixXd& x, const VectorXd& omega, const std::optional<MatrixXd>& rotation)
{
    if (x.cols() != omega.size())
        throw Error(Errc::dimension_mismatch, "weights do not match the number of columns");
    if (x.rows() < 2)
        throw Error(Errc::degenerate_sample, "PCA needs at least 2 rows");
    const MatrixXd cov = weighted_cov(x, x, exp_decay_weights(x.rows(), inf));
    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
    const VectorXd ev = eig.eigenvalues();
    if (ev(0) <= ev(ev.size() - 1) / 1e12)
        throw Error(Errc::rank_deficient, "covariance of X is rank deficient");
    const MatrixXd r = rotation.value_or(eig.eigenvectors());
    if (r.rows() != x.cols())
        throw Error(Errc::dimension_mismatch, "rotation rows do not match the number of columns");
    const VectorXd direct = x * omega;
    const VectorXd via_components = (x * r) * (r.transpose() * omega);
    return (via_components - direct).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, direct.cwiseAbs().maxCoeff());
}

} // namespace larx
