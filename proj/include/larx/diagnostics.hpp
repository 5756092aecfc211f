#pragma once

#include "larx/solver.hpp"

#include <string_view>

namespace larx {

enum class Coefficient { w, phi, omega, beta };

Coefficient parse_coefficient(std::string_view name);   // throws unknown_coefficient
std::string_view coefficient_name(Coefficient c);

// Conditional regression a = c + Bγ + e whose OLS solution is one coefficient vector of a fit.
struct OlsView {
    Coefficient which = Coefficient::beta;
    VectorXd a;
    MatrixXd b;
    WeightVector weights;
    VectorXd fit_coefficients;
    VectorXd ols_coefficients;
    double ols_intercept = 0.0;
    double agreement_gap = 0.0;   // ‖fit - ols‖∞
};

OlsView ols_view(const FitResult& fit, const Dataset& data, Coefficient which);

// Weighted-OLS standard errors of the slopes, DoF from the effective sample size 1/Σw².
VectorXd conditional_stderr(const OlsView& view);

// Lagrangian with λ_y = ρ_y - 1 and λ_l = 2ρ_l; inactive constraints contribute nothing.
double lagrangian(const MomentSet& m, const State& s, const Multipliers& mult, const Constraints& c);

struct LagrangianGradient {
    VectorXd w, omega, phi, beta;
    // ‖∂L‖ / (‖objective part‖ + ‖constraint part‖), 0 for empty blocks.
    double rel_w = 0.0, rel_omega = 0.0, rel_phi = 0.0, rel_beta = 0.0;

    double max_relative() const;
};

LagrangianGradient lagrangian_gradient(const MomentSet& m, const State& s, const Multipliers& mult,
                                       const Constraints& c);
LagrangianGradient lagrangian_gradient(const FitResult& fit, const MomentSet& m);

} // namespace larx
