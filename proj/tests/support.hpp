#pragma once

#include "larx/blockops.hpp"
#include "larx/design.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace testsupport {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd gaussian(std::mt19937_64& rng, Index r, Index c)
{
    std::normal_distribution<double> n(0.0, 1.0);
    MatrixXd m(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i)
            m(i, j) = n(rng);
    return m;
}

inline MatrixXd integers(std::mt19937_64& rng, Index r, Index c, int lo = -9, int hi = 9)
{
    std::uniform_int_distribution<int> u(lo, hi);
    MatrixXd m(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i)
            m(i, j) = u(rng);
    return m;
}

inline Index uniform_index(std::mt19937_64& rng, Index lo, Index hi)
{
    return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

inline larx::BlockStructure random_structure(std::mt19937_64& rng, Index count, Index max_size = 6)
{
    std::vector<Index> s;
    for (Index i = 0; i < count; ++i)
        s.push_back(uniform_index(rng, 1, max_size));
    return larx::BlockStructure(std::move(s));
}

// Weighted least squares with intercept through the sqrt-weight QR route.
struct WlsFit {
    double intercept = 0.0;
    VectorXd slopes;
    VectorXd fitted;
};

inline WlsFit wls(const VectorXd& y, const MatrixXd& x, const VectorXd& w)
{
    const Index s = y.size();
    MatrixXd design(s, x.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(x.cols()) = x;
    const VectorXd sw = w.cwiseSqrt();
    const MatrixXd dw = sw.asDiagonal() * design;
    const VectorXd yw = sw.asDiagonal() * y;
    const VectorXd coef = dw.colPivHouseholderQr().solve(yw);
    WlsFit f;
    f.intercept = coef(0);
    f.slopes = coef.tail(x.cols());
    f.fitted = design * coef;
    return f;
}

// Latent ARX sample: ỹ follows an ARX recursion in the latent x̃_j, and the
// observed blocks mix each latent with nuisance series through a random
// invertible matrix. A holds Y at lags 1..V_a, X block (j, v) holds X_j at lag v.
struct LatentProblem {
    larx::Dataset data;
    VectorXd w;        // Y w = ỹ
    VectorXd latent;   // ỹ on the dataset rows
};

inline LatentProblem latent_problem(std::mt19937_64& rng, const larx::Layout& layout, Index s, double noise,
                                    double half_life = std::numeric_limits<double>::infinity())
{
    using larx::Index;
    Index lag = layout.va;
    for (const auto& g : layout.groups)
        lag = std::max(lag, g.versions - 1);
    const Index total = s + lag + 50;
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);

    std::vector<MatrixXd> xs;
    std::vector<VectorXd> xl;
    for (const auto& g : layout.groups) {
        VectorXd lat = gaussian(rng, total, 1).col(0);
        MatrixXd mix = gaussian(rng, g.m, g.m) + 2.0 * MatrixXd::Identity(g.m, g.m);
        MatrixXd raw(total, g.m);
        raw.col(0) = lat;
        if (g.m > 1)
            raw.rightCols(g.m - 1) = gaussian(rng, total, g.m - 1);
        xs.push_back(raw * mix.transpose() + noise * gaussian(rng, total, g.m));
        xl.push_back(lat);
    }
    VectorXd phi(layout.va);
    for (Index v = 0; v < layout.va; ++v)
        phi(v) = 0.5 * ud(rng) / static_cast<double>(layout.va);
    std::vector<VectorXd> beta;
    for (const auto& g : layout.groups) {
        VectorXd b(g.versions);
        for (Index v = 0; v < g.versions; ++v)
            b(v) = ud(rng) + (ud(rng) > 0 ? 0.5 : -0.5);
        beta.push_back(b);
    }
    VectorXd y = VectorXd::Zero(total);
    for (Index t = lag; t < total; ++t) {
        double acc = 0.3 + noise * nd(rng) + 0.05 * nd(rng);
        for (Index v = 0; v < layout.va; ++v)
            acc += phi(v) * y(t - v - 1);
        for (std::size_t j = 0; j < xl.size(); ++j)
            for (Index v = 0; v < beta[j].size(); ++v)
                acc += beta[j](v) * xl[j](t - v);
        y(t) = acc;
    }
    const Index n = layout.n;
    const MatrixXd my = gaussian(rng, n, n) + 2.0 * MatrixXd::Identity(n, n);
    MatrixXd yraw(total, n);
    yraw.col(0) = y;
    if (n > 1)
        yraw.rightCols(n - 1) = gaussian(rng, total, n - 1);
    const MatrixXd yobs = yraw * my.transpose() + noise * gaussian(rng, total, n);

    const Index start = total - s;
    MatrixXd a(s, layout.a_cols());
    for (Index v = 0; v < layout.va; ++v)
        a.middleCols(v * n, n) = yobs.middleRows(start - v - 1, s);
    MatrixXd x(s, layout.x_cols());
    for (Index j = 0; j < layout.k(); ++j)
        for (Index v = 0; v < layout.groups[static_cast<std::size_t>(j)].versions; ++v)
            x.middleCols(layout.x_offset(j, v), layout.groups[static_cast<std::size_t>(j)].m) =
                xs[static_cast<std::size_t>(j)].middleRows(start - v, s);
    LatentProblem p{larx::make_dataset(yobs.bottomRows(s), a, x, layout, half_life), VectorXd(), VectorXd()};
    p.w = my.transpose().inverse().col(0);
    p.latent = y.tail(s);
    return p;
}

inline double correlation(const VectorXd& a, const VectorXd& b)
{
    const VectorXd ac = a.array() - a.mean();
    const VectorXd bc = b.array() - b.mean();
    return ac.dot(bc) / (ac.norm() * bc.norm());
}

} // namespace testsupport
