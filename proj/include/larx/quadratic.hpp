#pragma once

#include "larx/linalg.hpp"

#include <optional>

namespace larx {

struct QuadConstraints {
    const MatrixXd* variance_matrix = nullptr;   // S in x'Sx = target; must be positive definite
    double variance_target = 0.0;
    std::optional<double> sum_target;             // 1'x = target
};

// Stationarity convention: 2Qx - 2b + 2 λ_var S x + λ_sum 1 = 0.
struct QuadSolution {
    VectorXd x;
    double lambda_var = 0.0;
    double lambda_sum = 0.0;
    bool pseudo_inverse = false;
};

// Global minimizer of x'Qx - 2b'x under an optional ellipsoid equality and an
// optional sum equality. `hint` only breaks ties between equally good solutions.
QuadSolution minimize_quadratic(const MatrixXd& q, const VectorXd& b, const QuadConstraints& c,
                                const VectorXd* hint = nullptr);

struct SphereSolution {
    VectorXd t;
    double mu = 0.0;
};

// min t'Gt - 2g't subject to ‖t‖² = r2; (G + μI)t = g with G + μI positive semidefinite.
SphereSolution minimize_on_sphere(const MatrixXd& g_mat, const VectorXd& g, double r2,
                                  const VectorXd* hint = nullptr);

} // namespace larx
