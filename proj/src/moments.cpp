#include "larx/moments.hpp"

#include "larx/error.hpp"

#include <cmath>
#include <string>

namespace larx {

WeightVector::WeightVector(VectorXd raw, double half_life) : half_life_(half_life)
{
    if (raw.size() == 0)
        throw Error(Errc::empty_sample, "weight vector over an empty sample");
    if ((raw.array() < 0.0).any() || !raw.allFinite())
        throw Error(Errc::domain, "weights must be finite and nonnegative");
    const double total = raw.sum();
    if (!(total > 0.0))
        throw Error(Errc::domain, "weights sum to zero");
    values_ = raw / total;
}

double WeightVector::effective_size() const noexcept
{
    return 1.0 / values_.squaredNorm();
}

WeightVector exp_decay_weights(Index s, double half_life)
{
    if (s <= 0)
        throw Error(Errc::empty_sample, "exp_decay_weights: sample size must be positive");
    if (!(half_life > 0.0))
        throw Error(Errc::domain, "exp_decay_weights: half-life must be positive");
    VectorXd raw(s);
    for (Index t = 0; t < s; ++t)
        raw(t) = std::isinf(half_life) ? 1.0
                                       : std::exp2(-static_cast<double>(s - 1 - t) / half_life);
    return WeightVector(std::move(raw), half_life);
}

RowVectorXd weighted_mean(const MatrixXd& m, const WeightVector& w)
{
    if (m.rows() != w.size())
        throw Error(Errc::dimension_mismatch, "weighted_mean: " + std::to_string(m.rows()) +
                                                  " rows vs " + std::to_string(w.size()) + " weights");
    RowVectorXd out = RowVectorXd::Zero(m.cols());
    const auto& v = w.values();
    for (Index t = 0; t < m.rows(); ++t)
        for (Index j = 0; j < m.cols(); ++j)
            out(j) += v(t) * m(t, j);
    return out;
}

MatrixXd weighted_cov(const MatrixXd& a, const MatrixXd& b, const WeightVector& w)
{
    if (a.rows() != b.rows() || a.rows() != w.size())
        throw Error(Errc::dimension_mismatch, "weighted_cov: sample sizes differ");
    if (a.rows() < 2)
        throw Error(Errc::degenerate_sample, "weighted_cov: need at least 2 rows");
    const MatrixXd ac = a.rowwise() - weighted_mean(a, w);
    const MatrixXd bc = b.rowwise() - weighted_mean(b, w);
    const auto& v = w.values();
    MatrixXd out = MatrixXd::Zero(a.cols(), b.cols());
    // w_t (a b) keeps the product commutative, so cov(A,B)' == cov(B,A) bitwise.
    for (Index t = 0; t < a.rows(); ++t)
        for (Index j = 0; j < b.cols(); ++j)
            for (Index i = 0; i < a.cols(); ++i)
                out(i, j) += v(t) * (ac(t, i) * bc(t, j));
    return out;
}

MatrixXd MomentSet::s_x_block(Index j, Index v) const
{
    const Index m = layout.groups[static_cast<std::size_t>(j)].m;
    const Index off = layout.x_offset(j, v);
    return s_x.block(off, off, m, m);
}

namespace {

void reject_constant_columns(const MatrixXd& m, const WeightVector& w, const char* which)
{
    if (m.cols() == 0)
        return;
    const RowVectorXd mean = weighted_mean(m, w);
    for (Index j = 0; j < m.cols(); ++j) {
        const double var = ((m.col(j).array() - mean(j)).square() * w.values().array()).sum();
        const double scale = m.col(j).cwiseAbs().maxCoeff();
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale;
        if (!(var > floor * floor))
            throw Error(Errc::zero_variance, std::string("zero-variance column ") +
                                                 std::to_string(j) + " in " + which);
    }
}

} // namespace

MomentSet build_moment_set(const MatrixXd& y, const MatrixXd& a, const MatrixXd& x,
                           const Layout& layout, const WeightVector& w)
{
    const Index s = y.rows();
    if (a.rows() != s || x.rows() != s || w.size() != s)
        throw Error(Errc::dimension_mismatch, "build_moment_set: sample sizes differ");
    if (y.cols() != layout.n || a.cols() != layout.a_cols() || x.cols() != layout.x_cols())
        throw Error(Errc::structural, "build_moment_set: column counts do not match the layout");
    if (s < 2)
        throw Error(Errc::degenerate_sample, "build_moment_set: need at least 2 rows");
    reject_constant_columns(y, w, "Y");
    reject_constant_columns(a, w, "A");
    reject_constant_columns(x, w, "X");

    MomentSet m;
    m.layout = layout;
    m.mean_y = weighted_mean(y, w);
    m.mean_a = weighted_mean(a, w);
    m.mean_x = weighted_mean(x, w);
    m.s_y = weighted_cov(y, y, w);
    m.s_a = weighted_cov(a, a, w);
    m.s_x = weighted_cov(x, x, w);
    m.s_ya = weighted_cov(y, a, w);
    m.s_yx = weighted_cov(y, x, w);
    m.s_ax = weighted_cov(a, x, w);

    m.s_x_diag = MatrixXd::Zero(x.cols(), x.cols());
    for (Index j = 0; j < layout.k(); ++j) {
        const Index mj = layout.groups[static_cast<std::size_t>(j)].m;
        for (Index v = 0; v < layout.groups[static_cast<std::size_t>(j)].versions; ++v) {
            const Index off = layout.x_offset(j, v);
            m.s_x_diag.block(off, off, mj, mj) = m.s_x.block(off, off, mj, mj);
        }
    }
    return m;
}

MomentSet build_circular_lag_moments(const MatrixXd& y)
{
    const Index s = y.rows();
    if (s < 2)
        throw Error(Errc::degenerate_sample, "circular moments need at least 2 rows");
    MatrixXd lagged(s, y.cols());
    lagged.row(0) = y.row(s - 1);
    lagged.bottomRows(s - 1) = y.topRows(s - 1);
    const Layout layout{y.cols(), 1, {}};
    MomentSet m = build_moment_set(y, lagged, MatrixXd(s, 0), layout, exp_decay_weights(s, std::numeric_limits<double>::infinity()));
    m.mean_a = m.mean_y;
    m.s_a = m.s_y;
    return m;
}

} // namespace larx
