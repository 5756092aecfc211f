#pragma once

#include <Eigen/Dense>

namespace larx {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kConditionLimit = 1e12;

struct LinearSolve {
    VectorXd x;
    bool pseudo_inverse = false;
};

// Symmetric system via eigendecomposition; falls back to the Moore-Penrose
// solution when the condition estimate exceeds kConditionLimit.
LinearSolve solve_symmetric(const MatrixXd& a, const VectorXd& b);

// General square or rectangular system, least-squares / minimum-norm via SVD.
LinearSolve solve_general(const MatrixXd& a, const VectorXd& b);

// Orthonormal basis of the complement of the all-ones vector in R^m (m x (m-1)).
MatrixXd ones_complement_basis(Index m);

MatrixXd kron(const MatrixXd& a, const MatrixXd& b);

} // namespace larx
