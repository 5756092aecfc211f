#include "larx/quadratic.hpp"

#include "larx/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace larx {

SphereSolution minimize_on_sphere(const MatrixXd& g_mat, const VectorXd& g, double r2,
                                  const VectorXd* hint)
{
    const Index d = g.size();
    SphereSolution out;
    out.t = VectorXd::Zero(d);
    if (d == 0 || r2 <= 0.0)
        return out;
    const double r = std::sqrt(r2);

    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (g_mat + g_mat.transpose()));
    const VectorXd& lam = eig.eigenvalues();   // ascending
    const MatrixXd& v = eig.eigenvectors();
    const VectorXd gamma = v.transpose() * g;
    const double lmin = lam(0);
    const double spread = std::max({1.0, std::abs(lam(0)), std::abs(lam(d - 1))});
    const double gnorm = gamma.norm();

    Index deg = 1;
    while (deg < d && lam(deg) - lmin <= 1e-12 * spread)
        ++deg;
    const double g_deg = gamma.head(deg).norm();

    auto step = [&](double mu) {
        VectorXd t = VectorXd::Zero(d);
        for (Index i = 0; i < d; ++i) {
            const double den = lam(i) + mu;
            if (den > 0.0)
                t += (gamma(i) / den) * v.col(i);
        }
        return t;
    };

    if (g_deg <= 1e-13 * std::max(gnorm, std::numeric_limits<double>::min())) {
        // Possible hard case: the lowest eigenspace is (numerically) orthogonal to g.
        VectorXd base = VectorXd::Zero(d);
        for (Index i = deg; i < d; ++i)
            base += (gamma(i) / (lam(i) - lmin)) * v.col(i);
        const double rest = r2 - base.squaredNorm();
        if (rest >= 0.0) {
            VectorXd dir = v.col(0);
            if (hint && hint->size() == d && dir.dot(*hint) < 0.0)
                dir = -dir;
            else if (!hint || hint->size() != d) {
                Index k = 0;
                dir.cwiseAbs().maxCoeff(&k);
                if (dir(k) < 0.0)
                    dir = -dir;
            }
            out.t = base + std::sqrt(rest) * dir;
            out.mu = -lmin;
            return out;
        }
    }

    // ψ(μ) = Σ γ_i²/(λ_i+μ)² decreases on (-λ_min, ∞); solve 1/√ψ(μ) = 1/r.
    auto psi = [&](double mu, double& dpsi) {
        double p = 0.0;
        dpsi = 0.0;
        for (Index i = 0; i < d; ++i) {
            const double den = lam(i) + mu;
            const double q = gamma(i) * gamma(i) / (den * den);
            p += q;
            dpsi -= 2.0 * q / den;
        }
        return p;
    };
    double lo = -lmin;
    double hi = gnorm / r - lmin;
    if (!(hi > lo))
        hi = lo + std::max(1e-300, std::abs(lo) * 1e-15);
    double mu = hi;
    for (int it = 0; it < 500; ++it) {
        double dpsi = 0.0;
        const double p = psi(mu, dpsi);
        if (!(p > 0.0))
            break;
        const double f = 1.0 / std::sqrt(p) - 1.0 / r;
        if (f > 0.0)
            hi = mu;
        else
            lo = mu;
        if (std::abs(p - r2) <= 4.0 * std::numeric_limits<double>::epsilon() * r2)
            break;
        const double df = -0.5 * dpsi / (p * std::sqrt(p));
        double next = mu - f / df;
        if (!(next > lo && next < hi) || !std::isfinite(next))
            next = 0.5 * (lo + hi);
        if (next == mu || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(hi), std::abs(lo)))
            break;
        mu = next;
    }
    out.mu = mu;
    out.t = step(mu);
    const double norm = out.t.norm();
    if (norm > 0.0)
        out.t *= r / norm;
    return out;
}

namespace {

QuadSolution unconstrained(const MatrixXd& q, const VectorXd& b)
{
    const LinearSolve s = solve_symmetric(q, b);
    return {s.x, 0.0, 0.0, s.pseudo_inverse};
}

double lambda_sum_from_residual(const MatrixXd& q, const VectorXd& b, const QuadConstraints& c,
                                const VectorXd& x, double lambda_var)
{
    VectorXd r = 2.0 * b - 2.0 * q * x;
    if (c.variance_matrix)
        r -= 2.0 * lambda_var * (*c.variance_matrix) * x;
    return r.mean();
}

} // namespace

QuadSolution minimize_quadratic(const MatrixXd& q, const VectorXd& b, const QuadConstraints& c,
                                const VectorXd* hint)
{
    const Index m = b.size();
    if (q.rows() != m || q.cols() != m)
        throw Error(Errc::dimension_mismatch, "minimize_quadratic: Q and b disagree");
    if (!c.variance_matrix && !c.sum_target)
        return unconstrained(q, b);

    const MatrixXd n_basis = c.sum_target ? ones_complement_basis(m) : MatrixXd::Identity(m, m);
    VectorXd x0 = VectorXd::Zero(m);

    if (!c.variance_matrix) {
        x0.setConstant(*c.sum_target / static_cast<double>(m));
        const MatrixXd qn = n_basis.transpose() * q * n_basis;
        const LinearSolve z = solve_symmetric(qn, n_basis.transpose() * (b - q * x0));
        QuadSolution out;
        out.x = x0 + n_basis * z.x;
        out.pseudo_inverse = z.pseudo_inverse;
        out.lambda_sum = lambda_sum_from_residual(q, b, c, out.x, 0.0);
        return out;
    }

    const MatrixXd& s = *c.variance_matrix;
    if (s.rows() != m || s.cols() != m)
        throw Error(Errc::dimension_mismatch, "minimize_quadratic: S has the wrong shape");
    double r2 = c.variance_target;
    if (c.sum_target) {
        // S-orthogonal point on the sum plane: x0 = l S⁻¹1 / (1'S⁻¹1).
        const Eigen::LLT<MatrixXd> llt(s);
        if (llt.info() != Eigen::Success)
            throw Error(Errc::singular_matrix, "variance constraint matrix is not positive definite");
        const VectorXd si1 = llt.solve(VectorXd::Ones(m));
        x0 = (*c.sum_target / si1.sum()) * si1;
        r2 -= x0.dot(s * x0);
        if (r2 < -1e-12 * c.variance_target)
            throw Error(Errc::infeasible_constraint,
                        "variance target is below the minimum variance attainable with the sum target");
        if (m == 1 && r2 > 1e-10 * c.variance_target)
            throw Error(Errc::infeasible_constraint,
                        "a single weight cannot meet both a sum and a variance target");
        r2 = std::max(r2, 0.0);
    }

    const MatrixXd sn = n_basis.transpose() * s * n_basis;
    const Eigen::LLT<MatrixXd> lchol(sn);
    if (lchol.info() != Eigen::Success)
        throw Error(Errc::singular_matrix, "variance constraint matrix is not positive definite");
    const MatrixXd lmat = lchol.matrixL();
    // z = L⁻ᵀ t, so z' Sn z = ‖t‖².
    const MatrixXd linv = lmat.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(sn.rows(), sn.cols()));
    const MatrixXd to_z = linv.transpose();
    const MatrixXd g_mat = to_z.transpose() * (n_basis.transpose() * q * n_basis) * to_z;
    const VectorXd g_vec = to_z.transpose() * (n_basis.transpose() * (b - q * x0));

    VectorXd t_hint;
    const VectorXd* th = nullptr;
    if (hint && hint->size() == m) {
        t_hint = lmat.transpose() * (n_basis.transpose() * (*hint - x0));
        th = &t_hint;
    }
    const SphereSolution sp = minimize_on_sphere(g_mat, g_vec, r2, th);

    QuadSolution out;
    out.x = x0 + n_basis * (to_z * sp.t);
    out.lambda_var = sp.mu;
    if (c.sum_target)
        out.lambda_sum = lambda_sum_from_residual(q, b, c, out.x, out.lambda_var);
    return out;
}

} // namespace larx
