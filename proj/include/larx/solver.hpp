#pragma once

#include "larx/design.hpp"
#include "larx/moments.hpp"

#include <optional>
#include <vector>

namespace larx {

// Constraint targets of a CLARX problem; a missing optional leaves that constraint inactive.
struct Constraints {
    double sigma_y2 = 1.0;
    std::optional<double> l_y;
    std::vector<std::optional<double>> sigma_x2;
    std::vector<std::optional<double>> l_x;
    std::vector<Index> c;   // constrained version per group

    static Constraints from_spec(const ModelSpec& spec);
    static Constraints unconstrained(const Layout& layout, double sigma_y2);
    void validate(const Layout& layout) const;
    bool any_explanatory() const;
};

struct State {
    VectorXd w;
    BlockVec omega;   // blocks m_j
    VectorXd phi;
    BlockVec beta;    // blocks V_j
};

struct Multipliers {
    double rho_y = 1.0;   // 1 + λ_y
    double rho_l = 0.0;   // λ_l / 2
    VectorXd lambda_x;
    VectorXd lambda_p;
};

// Matrices that depend on the current coefficients.
struct StateMatrices {
    MatrixXd phi_i;       // φ ⊗ I_n
    MatrixXd i_w;         // I_{V_a} ⊗ w
    MatrixXd beta_i;      // β ⊙ I_ω
    MatrixXd i_omega;     // I_β ⊙ ω
    VectorXd phi_w;       // φ ⊗ w
    VectorXd beta_omega;  // β ⊙ ω
};

StateMatrices state_matrices(const Layout& layout, const State& s);

struct Shorthands {
    VectorXd v1, v2, v3, v4;
    MatrixXd theta;   // diag σ²_x (0 where inactive)
    MatrixXd l;       // diag l_p (0 where inactive)
    MatrixXd m1;      // diag m_j
    MatrixXd m2;      // (u⊙I_ω)'Σ^d_X(u⊙I_ω)
    BlockVec u;
};

Shorthands compute_shorthands(const MomentSet& m, const State& s, const Constraints& c);

BlockVec update_beta(const MomentSet& m, const State& s, bool* pseudo_inverse = nullptr);
VectorXd update_phi(const MomentSet& m, const State& s, bool* pseudo_inverse = nullptr);
BlockVec update_omega(const MomentSet& m, const State& s, const Multipliers& mult, const Constraints& c,
                      bool* pseudo_inverse = nullptr);
// Closed-form w step, rescaled onto w'Σ_Y w = σ_y² when `normalize` is set.
VectorXd update_w(const MomentSet& m, const State& s, const Multipliers& mult, const Constraints& c,
                  bool normalize = true);

struct DependentMultipliers {
    double rho_y = 1.0;
    double rho_l = 0.0;
};
DependentMultipliers update_dependent_multipliers(const MomentSet& m, const State& s, const Constraints& c);

struct ExplanatoryMultipliers {
    VectorXd lambda_x;
    VectorXd lambda_p;
    bool pseudo_inverse = false;
};
ExplanatoryMultipliers update_explanatory_multipliers(const MomentSet& m, const State& s, const Constraints& c);

double intercept(const MomentSet& m, const State& s);

// Weighted residual variance of Yw - A(φ⊗w) - X(β⊙ω).
double objective(const MomentSet& m, const State& s);

struct ConstraintResiduals {
    double dependent_variance = 0.0;   // relative to σ_y²
    std::optional<double> dependent_sum;
    std::vector<std::optional<double>> group_variance;   // relative to σ_j²
    std::vector<std::optional<double>> group_sum;

    double max() const;
};

ConstraintResiduals constraint_residuals(const MomentSet& m, const State& s, const Constraints& c);

struct FitResult {
    Layout layout;
    Constraints constraints;
    VectorXd w;
    BlockVec omega;
    VectorXd phi;
    BlockVec beta;
    double c = 0.0;
    Multipliers multipliers;
    int iterations = 0;
    bool converged = false;
    double objective = 0.0;
    double initial_objective = 0.0;
    ConstraintResiduals residuals;
    bool pseudo_inverse_used = false;

    State state() const { return {w, omega, phi, beta}; }
};

FitResult fit(const Dataset& data, const Constraints& c, const SolverOptions& opts = {});
FitResult fit(const Dataset& data, const ModelSpec& spec);
// `start` replaces the default initial guess; it should satisfy the constraints.
FitResult fit_moments(const MomentSet& m, const Constraints& c, const SolverOptions& opts = {},
                      const State* start = nullptr);

struct Prediction {
    VectorXd latent;
    VectorXd fitted;
    VectorXd residuals;
};

Prediction predict(const FitResult& fit, const Dataset& data);

// Sign convention: 1'v ≥ 0, or the first clearly nonzero entry positive when 1'v vanishes.
bool needs_flip(const VectorXd& v, bool sum_pinned_to_zero);

} // namespace larx
