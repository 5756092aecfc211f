#include "larx/checks.hpp"

#include "larx/blockops.hpp"
#include "larx/diagnostics.hpp"
#include "larx/error.hpp"
#include "larx/harness.hpp"
#include "larx/linalg.hpp"
#include "larx/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace larx {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

Index draw(std::mt19937_64& rng, Index lo, Index hi)
{
    return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

MatrixXd gaussian(std::mt19937_64& rng, Index r, Index c)
{
    std::normal_distribution<double> n(0.0, 1.0);
    MatrixXd m(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i)
            m(i, j) = n(rng);
    return m;
}

MatrixXd integers(std::mt19937_64& rng, Index r, Index c)
{
    std::uniform_int_distribution<int> u(-9, 9);
    MatrixXd m(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i)
            m(i, j) = u(rng);
    return m;
}

BlockStructure random_structure(std::mt19937_64& rng, Index count)
{
    std::vector<Index> s;
    for (Index i = 0; i < count; ++i)
        s.push_back(draw(rng, 1, 6));
    return BlockStructure(std::move(s));
}

// Weighted OLS fitted values through the square-root-weight QR route.
VectorXd wls_fitted(const VectorXd& y, const MatrixXd& x, const VectorXd& w)
{
    MatrixXd design(y.size(), x.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(x.cols()) = x;
    const VectorXd sw = w.cwiseSqrt();
    const VectorXd coef = (sw.asDiagonal() * design).colPivHouseholderQr().solve(sw.asDiagonal() * y);
    return design * coef;
}

ModelSpec spec_for(const Layout& l)
{
    ModelSpec s;
    for (Index i = 0; i < l.n; ++i)
        s.dependent.proxies.push_back("y" + std::to_string(i));
    for (Index v = 1; v <= l.va; ++v)
        s.ar_lags.push_back(static_cast<int>(v));
    for (Index j = 0; j < l.k(); ++j) {
        GroupSpec g;
        g.name = "g" + std::to_string(j);
        for (Index i = 0; i < l.groups[static_cast<std::size_t>(j)].m; ++i)
            g.proxies.push_back(g.name + "x" + std::to_string(i));
        g.lags.clear();
        for (Index v = 0; v < l.groups[static_cast<std::size_t>(j)].versions; ++v)
            g.lags.push_back(static_cast<int>(v));
        s.groups.push_back(g);
    }
    s.solver.max_iter = 5000;
    return s;
}

Dataset synthetic(const Layout& l, Index rows, double noise, double half_life, std::uint64_t seed)
{
    ModelSpec spec = spec_for(l);
    spec.sample.half_life = half_life;
    SynthParams p;
    p.rows = rows;
    return assemble_dataset(spec, synth_generate(spec, p, noise, seed).table);
}

Layout random_layout(std::mt19937_64& rng)
{
    Layout l{draw(rng, 1, 3), draw(rng, 0, 2), {}};
    for (Index j = 0, k = draw(rng, l.va == 0 ? 1 : 0, 2); j < k; ++j)
        l.groups.push_back({draw(rng, 1, 3), draw(rng, 1, 3)});
    return l;
}

// Feasible sum and variance targets on every block.
Constraints active_constraints(std::mt19937_64& rng, const Dataset& d)
{
    const Layout& l = d.layout;
    const MomentSet m = d.moments();
    std::uniform_real_distribution<double> ud(1.2, 2.0);
    Constraints c = Constraints::unconstrained(l, 1.0);
    c.l_y = 1.0;
    c.sigma_y2 = ud(rng) / m.s_y.ldlt().solve(VectorXd::Ones(l.n)).sum();
    for (Index j = 0; j < l.k(); ++j) {
        const auto ju = static_cast<std::size_t>(j);
        c.c[ju] = draw(rng, 0, l.groups[ju].versions - 1);
        const MatrixXd sj = m.s_x_block(j, c.c[ju]);
        c.l_x[ju] = 1.0;
        c.sigma_x2[ju] = ud(rng) / sj.ldlt().solve(VectorXd::Ones(sj.rows())).sum();
    }
    return c;
}

State random_state(std::mt19937_64& rng, const Layout& l)
{
    return {gaussian(rng, l.n, 1).col(0), BlockVec(gaussian(rng, l.omega_size(), 1).col(0), l.omega_structure()),
            gaussian(rng, l.va, 1).col(0), BlockVec(gaussian(rng, l.beta_size(), 1).col(0), l.beta_structure())};
}

double fd_gradient_gap(const MomentSet& m, const State& s, const Multipliers& mult, const Constraints& c)
{
    const LagrangianGradient g = lagrangian_gradient(m, s, mult, c);
    VectorXd analytic(g.w.size() + g.omega.size() + g.phi.size() + g.beta.size());
    analytic << g.w, g.omega, g.phi, g.beta;
    const Index nw = s.w.size(), no = s.omega.data().size(), np = s.phi.size();
    VectorXd x(analytic.size());
    x << s.w, s.omega.data(), s.phi, s.beta.data();
    auto unpack = [&](const VectorXd& v) {
        State t = s;
        t.w = v.head(nw);
        t.omega.data() = v.segment(nw, no);
        t.phi = v.segment(nw + no, np);
        t.beta.data() = v.tail(s.beta.data().size());
        return t;
    };
    VectorXd numeric(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
        VectorXd up = x, dn = x;
        up(i) += h;
        dn(i) -= h;
        numeric(i) = (lagrangian(m, unpack(up), mult, c) - lagrangian(m, unpack(dn), mult, c)) / (2.0 * h);
    }
    return (analytic - numeric).norm() / std::max(analytic.norm(), 1e-300);
}

// Sign-free relative distance between two directions.
double direction_gap(const VectorXd& a, const VectorXd& b)
{
    const double scale = a.dot(b) / b.squaredNorm();
    return (a - scale * b).norm() / a.norm();
}

double abs_correlation(const VectorXd& a, const VectorXd& b)
{
    const VectorXd ca = a.array() - a.mean(), cb = b.array() - b.mean();
    return std::abs(ca.dot(cb) / std::sqrt(ca.squaredNorm() * cb.squaredNorm()));
}

} // namespace

CheckResult check_operator_identities(std::uint64_t seed)
{
    std::mt19937_64 rng(seed + 1);
    bool exact = true;
    double float_gap = 0.0;
    auto record = [&](const MatrixXd& lhs, const MatrixXd& rhs, bool integer) {
        if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols()) {
            exact = false;
            float_gap = inf;
            return;
        }
        if (integer)
            exact = exact && lhs == rhs;
        else
            float_gap = std::max(float_gap, lhs.size() ? (lhs - rhs).cwiseAbs().maxCoeff() : 0.0);
    };

    const int per_kind = 100;
    for (int trial = 0; trial < 2 * per_kind; ++trial) {
        const bool integer = trial < per_kind;
        auto fill = [&](Index r, Index c) { return integer ? integers(rng, r, c) : gaussian(rng, r, c); };
        const Index k = draw(rng, 1, 5);

        // (A^⊕)' = (A')^⊕
        std::vector<MatrixXd> a, at, ml, mr, la, ar;
        std::vector<Index> rs, cs;
        for (Index i = 0; i < k; ++i) {
            a.push_back(fill(draw(rng, 1, 6), draw(rng, 1, 6)));
            at.push_back(a.back().transpose());
            ml.push_back(fill(draw(rng, 1, 6), a.back().rows()));
            mr.push_back(fill(a.back().cols(), draw(rng, 1, 6)));
            la.push_back(ml.back() * a.back());
            ar.push_back(a.back() * mr.back());
            rs.push_back(a.back().rows());
            cs.push_back(a.back().cols());
        }
        const MatrixXd ds = direct_sum(a);
        record(ds.transpose(), direct_sum(at), integer);

        // a^⊕ = a ⊙ I_k
        const BlockStructure s = random_structure(rng, k);
        const BlockVec v(fill(s.total(), 1).col(0), s);
        const BlockVec u(fill(s.total(), 1).col(0), s);
        record(direct_sum(v), khatri_rao(BlockMat(v.data(), s, Axis::rows), block_identity(BlockStructure::singletons(k))).data(),
               integer);

        // (a^⊕)'b = (b^⊕)'a
        record(direct_sum(v).transpose() * u.data(), direct_sum(u).transpose() * v.data(), integer);

        // Left and right multiplication commute with ⊕.
        record(left_multiply_row_blocks(ds, BlockStructure(rs), ml), direct_sum(la), integer);
        record(right_multiply_col_blocks(ds, BlockStructure(cs), mr), direct_sum(ar), integer);

        // (a⊙b) = (a⊙I_b)b = (I_a⊙b)a
        const BlockStructure sb = random_structure(rng, k);
        const BlockVec b(fill(sb.total(), 1).col(0), sb);
        const auto f = factor_khatri_rao(v, b);
        const VectorXd kr = khatri_rao_vec(v, b).data();
        record(f.left * b.data(), kr, integer);
        record(f.right * v.data(), kr, integer);
    }
    CheckResult r{1, "operator identities", exact && float_gap <= 1e-12, {}};
    r.detail = std::to_string(per_kind) + " integer and " + std::to_string(per_kind) +
               " float configurations per identity; integer exact: " + (exact ? "yes" : "no") +
               "; float max gap " + sci(float_gap);
    return r;
}

CheckResult check_ols_reduction(std::uint64_t seed)
{
    std::mt19937_64 rng(seed + 2);
    double worst = 0.0;
    int converged = 0;
    const int problems = 25;
    for (int trial = 0; trial < problems; ++trial) {
        Layout l{1, draw(rng, 0, 2), {}};
        for (Index j = 0, k = draw(rng, l.va == 0 ? 1 : 0, 2); j < k; ++j)
            l.groups.push_back({1, draw(rng, 1, 3)});
        const Dataset d = synthetic(l, 80, 0.3, trial % 2 ? 12.0 : inf, rng());
        const FitResult f = fit(d, Constraints::unconstrained(l, 1.0));
        converged += f.converged ? 1 : 0;
        MatrixXd reg(d.rows(), l.a_cols() + l.x_cols());
        reg << d.a, d.x;
        const VectorXd oracle = wls_fitted(d.y.col(0), reg, d.weights.values()) * f.w(0);
        worst = std::max(worst, (predict(f, d).fitted - oracle).cwiseAbs().maxCoeff());
    }
    return {2, "OLS reduction", converged == problems && worst <= 1e-8,
            std::to_string(converged) + "/" + std::to_string(problems) + " converged; max fitted-value gap " + sci(worst)};
}

CheckResult check_cca_equivalence(std::uint64_t seed)
{
    std::mt19937_64 rng(seed + 3);
    double corr_gap = 0.0, weight_gap = 0.0;
    bool converged = true;
    for (int trial = 0; trial < 25; ++trial) {
        const Index n = draw(rng, 3, 6), p = draw(rng, 3, 6), s = 150;
        const MatrixXd x = gaussian(rng, s, p);
        const MatrixXd y = x * gaussian(rng, p, n) * 0.4 + gaussian(rng, s, n);
        const WeightVector wt = exp_decay_weights(s, 40.0);
        const LvmrResult r = fit_lvmr(y, x, wt, 1.0);
        converged = converged && r.converged;

        const MatrixXd s_y = weighted_cov(y, y, wt), s_x = weighted_cov(x, x, wt);
        const MatrixXd ly = Eigen::LLT<MatrixXd>(s_y).matrixL(), lx = Eigen::LLT<MatrixXd>(s_x).matrixL();
        const MatrixXd k = ly.inverse() * weighted_cov(y, x, wt) * lx.inverse().transpose();
        const Eigen::JacobiSVD<MatrixXd> svd(k, Eigen::ComputeFullU);
        corr_gap = std::max(corr_gap, std::abs(r.canonical_correlation - svd.singularValues()(0)));
        weight_gap = std::max(weight_gap, direction_gap(r.w, ly.inverse().transpose() * svd.matrixU().col(0)));
    }
    return {3, "CCA equivalence", converged && corr_gap <= 1e-8 && weight_gap <= 1e-6,
            "25 problems; max correlation gap " + sci(corr_gap) + "; max weight direction gap " + sci(weight_gap)};
}

CheckResult check_caa_equivalence(std::uint64_t seed)
{
    std::mt19937_64 rng(seed + 4);
    double pair_gap = 0.0, rho_gap = 0.0;
    bool converged = true;
    int problems = 0;
    while (problems < 20) {
        const Index n = draw(rng, 2, 4);
        const MatrixXd q = gaussian(rng, n, n);
        VectorXd d(n);
        for (Index i = 0; i < n; ++i)
            d(i) = (i % 2 == 0 ? 1.0 : -1.0) * (0.85 - 0.25 * static_cast<double>(i));
        const MatrixXd phi = q * d.asDiagonal() * q.inverse();
        if (Eigen::EigenSolver<MatrixXd>(phi, false).eigenvalues().cwiseAbs().maxCoeff() >= 0.95)
            continue;
        MatrixXd y = MatrixXd::Zero(400, n);
        const MatrixXd e = gaussian(rng, 400, n);
        for (Index t = 1; t < 400; ++t)
            y.row(t) = y.row(t - 1) * phi.transpose() + e.row(t);
        const MomentSet m = build_circular_lag_moments(y);
        const CaaDecomposition caa = caa_decompose(m);
        const Lar1Result r = fit_lar1(m, 1.0);
        converged = converged && r.converged;
        VectorXd top = caa.eigenvectors.col(0);
        if (top.dot(r.w) < 0.0)
            top = -top;
        pair_gap = std::max({pair_gap, std::abs(r.phi - caa.eigenvalues(0)), (r.w - top).cwiseAbs().maxCoeff()});
        rho_gap = std::max(rho_gap, std::abs(r.rho_y - r.phi * r.phi));
        ++problems;
    }
    return {4, "CAA equivalence", converged && pair_gap <= 1e-6 && rho_gap <= 1e-8,
            "20 circular samples; max eigenpair gap " + sci(pair_gap) + "; max |rho_y - phi^2| " + sci(rho_gap)};
}

CheckResult check_constrained_kkt(std::uint64_t seed)
{
    std::mt19937_64 rng(seed + 5);
    double residual = 0.0, gradient = 0.0, fd = 0.0;
    int converged = 0;
    const int problems = 20;
    for (int trial = 0; trial < problems; ++trial) {
        Layout l{draw(rng, 2, 3), draw(rng, 0, 1), {}};
        for (int j = 0; j < 2; ++j)
            l.groups.push_back({draw(rng, 2, 3), draw(rng, 1, 2)});
        const Dataset d = synthetic(l, 150, 0.1, inf, rng());
        const Constraints c = active_constraints(rng, d);
        SolverOptions opts;
        opts.max_iter = 5000;
        const FitResult f = fit(d, c, opts);
        const MomentSet m = d.moments();
        if (f.converged) {
            ++converged;
            residual = std::max(residual, f.residuals.max());
            gradient = std::max(gradient, lagrangian_gradient(f, m).max_relative());
        }
        const Multipliers mult{0.5 + 0.05 * trial, -0.3, gaussian(rng, 2, 1).col(0), gaussian(rng, 2, 1).col(0)};
        fd = std::max(fd, fd_gradient_gap(m, random_state(rng, l), mult, c));
    }
    return {5, "KKT and constraints",
            converged >= problems * 3 / 4 && residual <= 1e-8 && gradient <= 1e-6 && fd <= 1e-6,
            std::to_string(converged) + "/" + std::to_string(problems) + " converged; max constraint residual " +
                sci(residual) + "; max relative gradient " + sci(gradient) + "; max finite-difference gap " + sci(fd)};
}

CheckResult check_conditional_ols(std::uint64_t seed)
{
    std::mt19937_64 rng(seed + 6);
    double worst = 0.0, w_gap = 0.0;
    int converged = 0;
    const int problems = 15;
    for (int trial = 0; trial < problems; ++trial) {
        const Layout l = random_layout(rng);
        const Dataset d = synthetic(l, 120, 0.05, trial % 3 ? inf : 30.0, rng());
        SolverOptions opts;
        opts.max_iter = 5000;
        const FitResult f = fit(d, Constraints::unconstrained(l, 1.0), opts);
        if (!f.converged)
            continue;
        ++converged;
        for (Coefficient which : {Coefficient::phi, Coefficient::omega, Coefficient::beta})
            worst = std::max(worst, ols_view(f, d, which).agreement_gap);
        w_gap = std::max(w_gap, ols_view(f, d, Coefficient::w).agreement_gap);
    }
    return {6, "conditional OLS consistency", converged == problems && worst <= 1e-8,
            std::to_string(converged) + "/" + std::to_string(problems) + " converged; max phi/omega/beta gap " +
                sci(worst) + "; w gap under the variance constraint (reported) " + sci(w_gap)};
}

CheckResult check_synthetic_recovery(std::uint64_t seed)
{
    const Layout l{3, 1, {{3, 2}}};
    const ModelSpec spec = spec_for(l);
    const std::array<double, 3> noise{0.0, 0.001, 0.01};
    const std::array<double, 3> floor{0.9999, 0.999, 0.99};
    std::array<double, 3> mean{};
    const int seeds = 20;
    for (std::size_t i = 0; i < noise.size(); ++i) {
        for (int s = 0; s < seeds; ++s) {
            SynthParams p;
            p.rows = 500;
            const SynthOutput out = synth_generate(spec, p, noise[i], seed + 100 + static_cast<std::uint64_t>(s));
            const Dataset d = assemble_dataset(spec, out.table);
            const FitResult f = fit(d, spec);
            mean[i] += abs_correlation(d.y * f.w, out.truth.latent_y.tail(d.rows())) / seeds;
        }
    }
    bool ok = mean[0] >= mean[1] && mean[1] >= mean[2];
    for (std::size_t i = 0; i < noise.size(); ++i)
        ok = ok && mean[i] >= floor[i];
    char buf[160];
    std::snprintf(buf, sizeof buf, "mean correlation %.8f / %.8f / %.8f at noise 0 / 0.001 / 0.01", mean[0], mean[1], mean[2]);
    return {7, "synthetic recovery", ok, buf};
}

CheckResult check_lsr_rank_one(std::uint64_t seed)
{
    std::mt19937_64 rng(seed + 8);
    const Index f = 4, m = 5;
    const VectorXd beta = gaussian(rng, f, 1).col(0), omega = gaussian(rng, m, 1).col(0);
    const MatrixXd x = gaussian(rng, 200, f * m);
    const VectorXd truth = kron(beta, omega).col(0);
    const VectorXd y = (x * truth).array() + 0.5;
    const LsrResult r = fit_lsr(y, x, f, m, exp_decay_weights(200, inf));
    const double gap = (r.coefficients() - truth).cwiseAbs().maxCoeff();
    return {8, "LSR rank-one exactness", r.converged && gap <= 1e-8 && r.parameter_count() == f + m,
            "20 coefficients, max gap " + sci(gap) + "; " + std::to_string(r.parameter_count()) + " free slope parameters"};
}

std::vector<CheckResult> run_property_suite(std::uint64_t seed)
{
    return {check_operator_identities(seed), check_ols_reduction(seed), check_cca_equivalence(seed),
            check_caa_equivalence(seed),     check_constrained_kkt(seed), check_conditional_ols(seed),
            check_synthetic_recovery(seed),  check_lsr_rank_one(seed)};
}

} // namespace larx
