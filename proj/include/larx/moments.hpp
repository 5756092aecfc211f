#pragma once

#include "larx/layout.hpp"

#include <Eigen/Dense>

#include <limits>

namespace larx {

using Eigen::RowVectorXd;

class WeightVector {
public:
    WeightVector() = default;
    // Normalizes nonnegative raw weights to unit sum.
    explicit WeightVector(VectorXd raw, double half_life = std::numeric_limits<double>::infinity());

    const VectorXd& values() const noexcept { return values_; }
    Index size() const noexcept { return values_.size(); }
    double half_life() const noexcept { return half_life_; }
    // 1 / Σ w_t²
    double effective_size() const noexcept;

private:
    VectorXd values_;
    double half_life_ = std::numeric_limits<double>::infinity();
};

// w_t ∝ 2^{-(s-1-t)/half_life}, oldest row first; infinite half-life gives equal weights.
WeightVector exp_decay_weights(Index s, double half_life);

RowVectorXd weighted_mean(const MatrixXd& m, const WeightVector& w);

// (A - 1Ā)' diag(w) (B - 1B̄), weights summing to one.
MatrixXd weighted_cov(const MatrixXd& a, const MatrixXd& b, const WeightVector& w);

struct MomentSet {
    Layout layout;
    RowVectorXd mean_y, mean_a, mean_x;
    MatrixXd s_y, s_a, s_x;
    MatrixXd s_ya, s_yx, s_ax;
    MatrixXd s_x_diag;   // Σ^d_X

    MatrixXd s_ay() const { return s_ya.transpose(); }
    MatrixXd s_xy() const { return s_yx.transpose(); }
    MatrixXd s_xa() const { return s_ax.transpose(); }
    // Σ_{X_{j,v}}
    MatrixXd s_x_block(Index j, Index v) const;
};

MomentSet build_moment_set(const MatrixXd& y, const MatrixXd& a, const MatrixXd& x,
                           const Layout& layout, const WeightVector& w);

// Equal-weight moments of Y and its one-period lag with the sample wrapped
// circularly, so that Σ_A equals Σ_Y exactly.
MomentSet build_circular_lag_moments(const MatrixXd& y);

} // namespace larx
