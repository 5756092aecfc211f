#include "larx/special.hpp"

#include "larx/error.hpp"
#include "larx/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace larx {

namespace {

void first_entry_positive(Eigen::Ref<VectorXd> v)
{
    if (needs_flip(v, true))
        v = -v;
}

Eigen::LLT<MatrixXd> cholesky(const MatrixXd& s, const char* what)
{
    Eigen::LLT<MatrixXd> llt(s);
    if (llt.info() != Eigen::Success)
        throw Error(Errc::singular_matrix, std::string(what) + " is not positive definite");
    const VectorXd d = MatrixXd(llt.matrixL()).diagonal();
    if (d.minCoeff() <= d.maxCoeff() / std::sqrt(kConditionLimit))
        throw Error(Errc::singular_matrix, std::string(what) + " is numerically singular");
    return llt;
}

// Symmetric K = L⁻¹ B L⁻ᵀ for Σ = LL'; eigenvectors mapped back through L⁻ᵀ.
struct SymmetricEigen {
    VectorXd values;
    MatrixXd vectors;
};

SymmetricEigen whitened_eigen(const Eigen::LLT<MatrixXd>& llt, const MatrixXd& b)
{
    const auto l = llt.matrixL();
    MatrixXd k = l.solve(b);
    k = l.solve(k.transpose()).transpose();
    k = 0.5 * (k + k.transpose());
    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(k);
    SymmetricEigen out{eig.eigenvalues(), llt.matrixU().solve(eig.eigenvectors())};
    return out;
}

} // namespace

VectorXd LsrResult::coefficients() const
{
    return kron(beta, omega).col(0);
}

LsrResult fit_lsr(const VectorXd& y, const MatrixXd& x, Index f, Index m, const WeightVector& w,
                  const SolverOptions& opts)
{
    if (f < 1 || m < 1 || x.cols() != f * m)
        throw Error(Errc::structural, "LSR needs F versions of m proxies");
    if (x.rows() != y.size() || w.size() != y.size())
        throw Error(Errc::dimension_mismatch, "LSR inputs have different row counts");
    const MatrixXd ym = y;
    const MatrixXd s_x = weighted_cov(x, x, w);
    const VectorXd s_xy = weighted_cov(x, ym, w).col(0);
    const MatrixXd im = MatrixXd::Identity(m, m);
    const MatrixXd i_f = MatrixXd::Identity(f, f);

    LsrResult r;
    r.omega = VectorXd::Constant(m, 1.0 / std::sqrt(static_cast<double>(m)));
    r.beta = VectorXd::Zero(f);
    for (int it = 1; it <= opts.max_iter; ++it) {
        const VectorXd omega_prev = r.omega, beta_prev = r.beta;
        const MatrixXd io = kron(i_f, r.omega);
        const LinearSolve b = solve_symmetric(io.transpose() * s_x * io, io.transpose() * s_xy);
        r.beta = b.x;
        const MatrixXd bi = kron(r.beta, im);
        const LinearSolve o = solve_symmetric(bi.transpose() * s_x * bi, bi.transpose() * s_xy);
        r.omega = o.x;
        r.pseudo_inverse_used = r.pseudo_inverse_used || b.pseudo_inverse || o.pseudo_inverse;
        const double norm = r.omega.norm();
        if (norm > 0.0) {
            r.omega /= norm;
            r.beta *= norm;
        }
        if (needs_flip(r.omega, true)) {
            r.omega = -r.omega;
            r.beta = -r.beta;
        }
        r.iterations = it;
        const double delta = std::max((r.omega - omega_prev).cwiseAbs().maxCoeff(),
                                      (r.beta - beta_prev).cwiseAbs().maxCoeff());
        if (delta <= opts.tol * std::max(1.0, r.beta.cwiseAbs().maxCoeff())) {
            r.converged = true;
            break;
        }
    }
    r.c = weighted_mean(ym, w)(0) - weighted_mean(x, w).dot(r.coefficients());
    return r;
}

LvmrResult fit_lvmr(const MatrixXd& y, const MatrixXd& x, const WeightVector& wt, double sigma_y2,
                    const SolverOptions& opts)
{
    if (x.rows() != y.rows() || wt.size() != y.rows())
        throw Error(Errc::dimension_mismatch, "LVMR inputs have different row counts");
    if (!(sigma_y2 > 0.0))
        throw Error(Errc::config, "variance target must be positive");
    const MatrixXd s_y = weighted_cov(y, y, wt);
    const MatrixXd s_x = weighted_cov(x, x, wt);
    const MatrixXd s_yx = weighted_cov(y, x, wt);
    const auto ly = cholesky(s_y, "Sigma_Y");
    const auto lx = cholesky(s_x, "Sigma_X");
    const MatrixXd reg = lx.solve(s_yx.transpose());   // Σ_X⁻¹Σ_XY
    const MatrixXd op = ly.solve(s_yx * reg);          // Σ_Y⁻¹Σ_YXΣ_X⁻¹Σ_XY

    auto scale_to_target = [&](VectorXd& v) {
        const double var = v.dot(s_y * v);
        if (var > 0.0)
            v *= std::sqrt(sigma_y2 / var);
        if (needs_flip(v, false))
            v = -v;
    };

    LvmrResult r;
    r.w = VectorXd::Ones(y.cols());
    scale_to_target(r.w);
    for (int it = 1; it <= opts.max_iter; ++it) {
        VectorXd next = op * r.w;
        scale_to_target(next);
        const double delta = (next - r.w).cwiseAbs().maxCoeff();
        r.w = next;
        r.iterations = it;
        if (delta <= opts.tol * r.w.cwiseAbs().maxCoeff()) {
            r.converged = true;
            break;
        }
    }
    r.omega = reg * r.w;
    r.rho_y = r.w.dot(s_yx * r.omega) / sigma_y2;
    r.canonical_correlation = std::sqrt(std::max(r.rho_y, 0.0));
    r.c = weighted_mean(y, wt).dot(r.w) - weighted_mean(x, wt).dot(r.omega);
    return r;
}

CcaDecomposition cca_decompose(const MatrixXd& s_y, const MatrixXd& s_yx, const MatrixXd& s_x)
{
    if (s_yx.rows() != s_y.rows() || s_yx.cols() != s_x.rows())
        throw Error(Errc::dimension_mismatch, "CCA covariance blocks disagree");
    const auto ly = cholesky(s_y, "Sigma_Y");
    const auto lx = cholesky(s_x, "Sigma_X");
    const SymmetricEigen e = whitened_eigen(ly, s_yx * lx.solve(s_yx.transpose()));
    const Index n = e.values.size();
    CcaDecomposition out{VectorXd(n), MatrixXd(n, n)};
    for (Index i = 0; i < n; ++i) {
        const Index src = n - 1 - i;   // ascending → descending
        out.eigenvalues(i) = std::max(e.values(src), 0.0);
        out.eigenvectors.col(i) = e.vectors.col(src);
        first_entry_positive(out.eigenvectors.col(i));
    }
    return out;
}

CaaDecomposition caa_decompose(const MomentSet& m)
{
    if (m.layout.va != 1 || m.layout.k() != 0)
        throw Error(Errc::structural, "CAA needs one lag of Y and no exogenous groups");
    const auto ly = cholesky(m.s_y, "Sigma_Y");
    const MatrixXd sym = m.s_ya + m.s_ay();
    const SymmetricEigen e = whitened_eigen(ly, 0.5 * sym);
    const Index n = e.values.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return std::abs(e.values(a)) > std::abs(e.values(b)); });
    CaaDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Index i = 0; i < n; ++i) {
        const Index src = order[static_cast<std::size_t>(i)];
        out.eigenvalues(i) = e.values(src);
        out.eigenvectors.col(i) = e.vectors.col(src);
        first_entry_positive(out.eigenvectors.col(i));
    }
    out.matrix = 0.5 * ly.solve(sym);
    out.stationarity_gap = (m.s_y - m.s_a).norm() / m.s_y.norm();
    if (out.stationarity_gap > kStationarityWarn)
        out.warning = "Sigma_Y and Sigma_A differ by " + std::to_string(out.stationarity_gap) +
                      " (relative); the eigenvectors are only approximately the LAR(1) solutions";
    return out;
}

MatrixXd caa_matrix_alternative(const MomentSet& m)
{
    if (m.layout.va != 1 || m.layout.k() != 0)
        throw Error(Errc::structural, "CAA needs one lag of Y and no exogenous groups");
    const auto ly = cholesky(m.s_y, "Sigma_Y");
    const auto la = cholesky(m.s_a, "Sigma_A");
    return 0.5 * (la.solve(m.s_ay()) + ly.solve(m.s_ya));
}

Lar1Result fit_lar1(const MomentSet& m, double sigma_y2, const SolverOptions& opts)
{
    if (m.layout.va != 1 || m.layout.k() != 0)
        throw Error(Errc::structural, "LAR(1) needs one lag of Y and no exogenous groups");
    // Start from the strongest autocorrelation direction; the block iteration
    // otherwise keeps the sign of the first φ and can settle on a weaker pair.
    const CaaDecomposition caa = caa_decompose(m);
    State start;
    start.w = caa.eigenvectors.col(0) * std::sqrt(sigma_y2);
    if (needs_flip(start.w, false))
        start.w = -start.w;
    start.phi = VectorXd::Zero(1);
    start.omega = BlockVec(VectorXd(0), m.layout.omega_structure());
    start.beta = BlockVec(VectorXd(0), m.layout.beta_structure());
    const FitResult f = fit_moments(m, Constraints::unconstrained(m.layout, sigma_y2), opts, &start);
    return {f.w, f.phi(0), f.multipliers.rho_y, f.c, f.iterations, f.converged};
}

VectorXd trivial_sdm(const MatrixXd& s_y, SdmMode mode, double target)
{
    const auto llt = cholesky(s_y, "Sigma_Y");
    const Index n = s_y.rows();
    if (mode == SdmMode::min_variance_portfolio) {
        const VectorXd x = llt.solve(VectorXd::Ones(n));
        return target * x / x.sum();
    }
    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (s_y + s_y.transpose()));
    VectorXd v = mode == SdmMode::pca_max ? eig.eigenvectors().col(n - 1) : eig.eigenvectors().col(0);
    first_entry_positive(v);
    return v;
}

} // namespace larx
