#pragma once

#include "larx/solver.hpp"

#include <optional>
#include <string>

namespace larx {

struct LsrResult {
    VectorXd omega;   // m, unit norm
    VectorXd beta;    // F
    double c = 0.0;
    int iterations = 0;
    bool converged = false;
    bool pseudo_inverse_used = false;

    VectorXd coefficients() const;   // β ⊗ ω
    Index parameter_count() const { return omega.size() + beta.size(); }
};

// y on F versions of m proxies; x holds the versions side by side, m columns each.
LsrResult fit_lsr(const VectorXd& y, const MatrixXd& x, Index f, Index m, const WeightVector& w,
                  const SolverOptions& opts = {1000, 1e-13, 0.0, 0});

struct LvmrResult {
    VectorXd w;
    VectorXd omega;
    double rho_y = 0.0;
    double c = 0.0;
    double canonical_correlation = 0.0;
    int iterations = 0;
    bool converged = false;
};

LvmrResult fit_lvmr(const MatrixXd& y, const MatrixXd& x, const WeightVector& w, double sigma_y2 = 1.0,
                    const SolverOptions& opts = {200000, 1e-14, 0.0, 0});

struct CcaDecomposition {
    VectorXd eigenvalues;    // squared canonical correlations, descending
    MatrixXd eigenvectors;   // columns w_i with w_i'Σ_Y w_i = 1
};

CcaDecomposition cca_decompose(const MatrixXd& s_y, const MatrixXd& s_yx, const MatrixXd& s_x);

struct Lar1Result {
    VectorXd w;
    double phi = 0.0;
    double rho_y = 0.0;
    double c = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Requires a moment set with V_a = 1 and no exogenous groups.
Lar1Result fit_lar1(const MomentSet& m, double sigma_y2 = 1.0, const SolverOptions& opts = {});

struct CaaDecomposition {
    VectorXd eigenvalues;    // φ_i, descending by |φ|
    MatrixXd eigenvectors;   // columns w_i with w_i'Σ_Y w_i = 1
    MatrixXd matrix;         // ½Σ_Y⁻¹(Σ_AY + Σ_YA)
    double stationarity_gap = 0.0;   // ‖Σ_Y - Σ_A‖ / ‖Σ_Y‖
    std::optional<std::string> warning;
};

inline constexpr double kStationarityWarn = 1e-6;

CaaDecomposition caa_decompose(const MomentSet& m);
// ½[Σ_A⁻¹Σ_AY + Σ_Y⁻¹Σ_YA]
MatrixXd caa_matrix_alternative(const MomentSet& m);

enum class SdmMode { min_variance_portfolio, pca_max, pca_min };

// Minimum-variance weights summing to `target`, or unit-length extreme principal components.
VectorXd trivial_sdm(const MatrixXd& s_y, SdmMode mode, double target = 1.0);

} // namespace larx
