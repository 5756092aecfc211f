#include "larx/linalg.hpp"

#include <cmath>

namespace larx {

LinearSolve solve_symmetric(const MatrixXd& a, const VectorXd& b)
{
    LinearSolve out;
    if (a.rows() == 0) {
        out.x = VectorXd(0);
        return out;
    }
    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (a + a.transpose()));
    const VectorXd& lam = eig.eigenvalues();
    const double big = lam.cwiseAbs().maxCoeff();
    const double small = lam.cwiseAbs().minCoeff();
    out.pseudo_inverse = !(big > 0.0) || small * kConditionLimit < big;
    const double cut = big / kConditionLimit;
    VectorXd proj = eig.eigenvectors().transpose() * b;
    for (Index i = 0; i < lam.size(); ++i)
        proj(i) = std::abs(lam(i)) > cut && lam(i) != 0.0 ? proj(i) / lam(i) : 0.0;
    out.x = eig.eigenvectors() * proj;
    return out;
}

LinearSolve solve_general(const MatrixXd& a, const VectorXd& b)
{
    LinearSolve out;
    if (a.cols() == 0) {
        out.x = VectorXd(0);
        return out;
    }
    Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sv = svd.singularValues();
    const double big = sv.size() ? sv(0) : 0.0;
    const double small = sv.size() ? sv(sv.size() - 1) : 0.0;
    out.pseudo_inverse = !(big > 0.0) || small * kConditionLimit < big ||
                         a.rows() != a.cols();
    svd.setThreshold(1.0 / kConditionLimit);
    out.x = svd.solve(b);
    return out;
}

MatrixXd ones_complement_basis(Index m)
{
    if (m <= 1)
        return MatrixXd(m, 0);
    // Householder reflector mapping e_1 to 1/√m; its remaining columns span 1⊥.
    VectorXd v = VectorXd::Constant(m, 1.0 / std::sqrt(static_cast<double>(m)));
    v(0) -= 1.0;
    const double vv = v.squaredNorm();
    MatrixXd h = MatrixXd::Identity(m, m);
    if (vv > 0.0)
        h -= (2.0 / vv) * v * v.transpose();
    return h.rightCols(m - 1);
}

MatrixXd kron(const MatrixXd& a, const MatrixXd& b)
{
    MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

} // namespace larx
