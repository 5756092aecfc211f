#include "larx/solver.hpp"

#include "larx/error.hpp"
#include "larx/linalg.hpp"
#include "larx/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace larx {

namespace {

std::size_t at(Index j) { return static_cast<std::size_t>(j); }

double max_abs(const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

} // namespace

Constraints Constraints::from_spec(const ModelSpec& spec)
{
    Constraints c;
    c.sigma_y2 = spec.dependent.variance_target;
    c.l_y = spec.dependent.sum_target;
    for (const auto& g : spec.groups) {
        c.sigma_x2.push_back(g.variance_target);
        c.l_x.push_back(g.sum_target);
        c.c.push_back(g.constrained_version);
    }
    return c;
}

Constraints Constraints::unconstrained(const Layout& layout, double sigma_y2)
{
    Constraints c;
    c.sigma_y2 = sigma_y2;
    c.sigma_x2.assign(at(layout.k()), std::nullopt);
    c.l_x.assign(at(layout.k()), std::nullopt);
    c.c.assign(at(layout.k()), 0);
    return c;
}

void Constraints::validate(const Layout& layout) const
{
    if (!(sigma_y2 > 0.0))
        throw Error(Errc::config, "dependent variance target must be positive");
    const auto k = at(layout.k());
    if (sigma_x2.size() != k || l_x.size() != k || c.size() != k)
        throw Error(Errc::structural, "constraint targets do not match the group count");
    for (std::size_t j = 0; j < k; ++j) {
        if (c[j] < 0 || c[j] >= layout.groups[j].versions)
            throw Error(Errc::config, "constrained version out of range for group " + std::to_string(j));
        if (sigma_x2[j] && !(*sigma_x2[j] > 0.0))
            throw Error(Errc::config, "group variance targets must be positive");
    }
}

bool Constraints::any_explanatory() const
{
    auto set = [](const auto& v) { return std::any_of(v.begin(), v.end(), [](const auto& o) { return o.has_value(); }); };
    return set(sigma_x2) || set(l_x);
}

StateMatrices state_matrices(const Layout& layout, const State& s)
{
    StateMatrices sm;
    const MatrixXd in = MatrixXd::Identity(layout.n, layout.n);
    sm.phi_i = kron(s.phi, in);
    sm.i_w = kron(MatrixXd::Identity(layout.va, layout.va), s.w);
    sm.phi_w = kron(s.phi, s.w);
    if (layout.k() > 0) {
        const BlockMat beta(s.beta.data(), s.beta.structure(), Axis::rows);
        const BlockMat omega(s.omega.data(), s.omega.structure(), Axis::rows);
        sm.beta_i = khatri_rao(beta, block_identity(s.omega.structure())).data();
        sm.i_omega = khatri_rao(block_identity(s.beta.structure()), omega).data();
        sm.beta_omega = khatri_rao_vec(s.beta, s.omega).data();
    } else {
        sm.beta_i = MatrixXd(0, 0);
        sm.i_omega = MatrixXd(0, 0);
        sm.beta_omega = VectorXd(0);
    }
    return sm;
}

Shorthands compute_shorthands(const MomentSet& m, const State& s, const Constraints& c)
{
    const Layout& l = m.layout;
    const StateMatrices sm = state_matrices(l, s);
    const Index k = l.k();
    Shorthands out;
    out.v1 = (sm.phi_i.transpose() * m.s_ay() + m.s_ya * sm.phi_i - sm.phi_i.transpose() * m.s_a * sm.phi_i) * s.w;
    out.v2 = (m.s_yx - sm.phi_i.transpose() * m.s_ax) * sm.beta_omega;
    out.v3 = sm.beta_i.transpose() * (m.s_xy() - m.s_xa() * sm.phi_i) * s.w;
    out.v4 = sm.beta_i.transpose() * m.s_x * sm.beta_omega;
    out.theta = MatrixXd::Zero(k, k);
    out.l = MatrixXd::Zero(k, k);
    out.m1 = MatrixXd::Zero(k, k);
    VectorXd u = VectorXd::Zero(l.beta_size());
    const BlockStructure bs = l.beta_structure();
    for (Index j = 0; j < k; ++j) {
        out.theta(j, j) = c.sigma_x2[at(j)].value_or(0.0);
        out.l(j, j) = c.l_x[at(j)].value_or(0.0);
        out.m1(j, j) = static_cast<double>(l.groups[at(j)].m);
        u(bs.offset(j) + c.c[at(j)]) = 1.0;
    }
    out.u = BlockVec(std::move(u), bs);
    if (k > 0) {
        const MatrixXd u_i = khatri_rao(BlockMat(out.u.data(), bs, Axis::rows), block_identity(l.omega_structure())).data();
        out.m2 = u_i.transpose() * m.s_x_diag * u_i;
    } else {
        out.m2 = MatrixXd(0, 0);
    }
    return out;
}

BlockVec update_beta(const MomentSet& m, const State& s, bool* pseudo_inverse)
{
    const StateMatrices sm = state_matrices(m.layout, s);
    const MatrixXd normal = sm.i_omega.transpose() * m.s_x * sm.i_omega;
    const VectorXd rhs = sm.i_omega.transpose() * (m.s_xy() * s.w - m.s_xa() * sm.phi_w);
    const LinearSolve sol = solve_symmetric(normal, rhs);
    if (pseudo_inverse)
        *pseudo_inverse = sol.pseudo_inverse;
    return BlockVec(sol.x, m.layout.beta_structure());
}

VectorXd update_phi(const MomentSet& m, const State& s, bool* pseudo_inverse)
{
    const StateMatrices sm = state_matrices(m.layout, s);
    const MatrixXd normal = sm.i_w.transpose() * m.s_a * sm.i_w;
    const VectorXd rhs = sm.i_w.transpose() * (m.s_ay() * s.w - m.s_ax * sm.beta_omega);
    const LinearSolve sol = solve_symmetric(normal, rhs);
    if (pseudo_inverse)
        *pseudo_inverse = sol.pseudo_inverse;
    return sol.x;
}

BlockVec update_omega(const MomentSet& m, const State& s, const Multipliers& mult, const Constraints& c,
                      bool* pseudo_inverse)
{
    const Layout& l = m.layout;
    const Shorthands sh = compute_shorthands(m, s, c);
    const StateMatrices sm = state_matrices(l, s);
    const BlockStructure os = l.omega_structure();
    MatrixXd lhs = sm.beta_i.transpose() * m.s_x * sm.beta_i;
    VectorXd lam_i(l.omega_size());
    for (Index j = 0; j < l.k(); ++j)
        lam_i.segment(os.offset(j), os.size(j)).setConstant(mult.lambda_x.size() ? mult.lambda_x(j) : 0.0);
    lhs += sh.m2 * lam_i.asDiagonal();
    VectorXd rhs = sh.v3;
    if (mult.lambda_p.size())
        rhs -= 0.5 * direct_sum(ones(os)) * mult.lambda_p;
    const LinearSolve sol = solve_general(lhs, rhs);
    if (pseudo_inverse)
        *pseudo_inverse = sol.pseudo_inverse;
    return BlockVec(sol.x, os);
}

VectorXd update_w(const MomentSet& m, const State& s, const Multipliers& mult, const Constraints& c,
                  bool normalize)
{
    if (mult.rho_y == 0.0)
        throw Error(Errc::singular_multiplier, "rho_y is zero");
    const Shorthands sh = compute_shorthands(m, s, c);
    const Eigen::LLT<MatrixXd> llt(m.s_y);
    if (llt.info() != Eigen::Success)
        throw Error(Errc::singular_matrix, "Sigma_Y is not positive definite");
    VectorXd w = (llt.solve(sh.v1 + sh.v2) - mult.rho_l * llt.solve(VectorXd::Ones(m.layout.n))) / mult.rho_y;
    if (normalize) {
        const double var = w.dot(m.s_y * w);
        if (var > 0.0)
            w *= std::sqrt(c.sigma_y2 / var);
    }
    return w;
}

DependentMultipliers update_dependent_multipliers(const MomentSet& m, const State& s, const Constraints& c)
{
    const Shorthands sh = compute_shorthands(m, s, c);
    const VectorXd v = sh.v1 + sh.v2;
    const double n = static_cast<double>(m.layout.n);
    const double ly = c.l_y.value_or(0.0);
    const VectorXd sw = m.s_y * s.w;
    const double den = n * c.sigma_y2 - ly * sw.sum();
    const double num = (n * s.w - ly * VectorXd::Ones(m.layout.n)).dot(v);
    if (std::abs(den) <= 1e-14 * (n * c.sigma_y2 + std::abs(ly * sw.sum())))
        throw Error(Errc::degenerate_constraint, "dependent multiplier denominator vanishes");
    DependentMultipliers out;
    out.rho_y = num / den;
    out.rho_l = c.l_y ? (v.sum() - out.rho_y * sw.sum()) / n : 0.0;
    return out;
}

ExplanatoryMultipliers update_explanatory_multipliers(const MomentSet& m, const State& s, const Constraints& c)
{
    const Layout& l = m.layout;
    const Index k = l.k();
    ExplanatoryMultipliers out;
    out.lambda_x = VectorXd::Zero(k);
    out.lambda_p = VectorXd::Zero(k);
    if (k == 0 || !c.any_explanatory())
        return out;
    const Shorthands sh = compute_shorthands(m, s, c);
    const BlockStructure os = l.omega_structure();
    const MatrixXd ones_ds = direct_sum(ones(os));
    const MatrixXd omega_ds = direct_sum(s.omega);
    const VectorXd d = sh.v3 - sh.v4;

    MatrixXd lhs = sh.m1 * sh.theta - sh.l * ones_ds.transpose() * sh.m2 * omega_ds;
    VectorXd rhs = (omega_ds * sh.m1 - ones_ds * sh.l).transpose() * d;
    for (Index j = 0; j < k; ++j) {
        if (c.sigma_x2[at(j)])
            continue;
        lhs.row(j).setZero();
        lhs.col(j).setZero();
        lhs(j, j) = 1.0;
        rhs(j) = 0.0;
    }
    const LinearSolve lx = solve_general(lhs, rhs);
    out.lambda_x = lx.x;
    out.pseudo_inverse = lx.pseudo_inverse;
    out.lambda_p = 2.0 * sh.m1.diagonal().cwiseInverse().asDiagonal() *
                   (ones_ds.transpose() * (d - sh.m2 * omega_ds * out.lambda_x));
    for (Index j = 0; j < k; ++j)
        if (!c.l_x[at(j)])
            out.lambda_p(j) = 0.0;
    return out;
}

double intercept(const MomentSet& m, const State& s)
{
    const StateMatrices sm = state_matrices(m.layout, s);
    double c = m.mean_y.dot(s.w);
    if (m.layout.va > 0)
        c -= m.mean_a.dot(sm.phi_w);
    if (m.layout.k() > 0)
        c -= m.mean_x.dot(sm.beta_omega);
    return c;
}

double objective(const MomentSet& m, const State& s)
{
    const StateMatrices sm = state_matrices(m.layout, s);
    const VectorXd& pw = sm.phi_w;
    const VectorXd& b = sm.beta_omega;
    double f = s.w.dot(m.s_y * s.w);
    if (pw.size()) {
        f += pw.dot(m.s_a * pw) - 2.0 * s.w.dot(m.s_ya * pw);
        if (b.size())
            f += 2.0 * pw.dot(m.s_ax * b);
    }
    if (b.size())
        f += b.dot(m.s_x * b) - 2.0 * s.w.dot(m.s_yx * b);
    return f;
}

double ConstraintResiduals::max() const
{
    double r = dependent_variance;
    if (dependent_sum)
        r = std::max(r, *dependent_sum);
    for (const auto& g : group_variance)
        if (g)
            r = std::max(r, *g);
    for (const auto& g : group_sum)
        if (g)
            r = std::max(r, *g);
    return r;
}

ConstraintResiduals constraint_residuals(const MomentSet& m, const State& s, const Constraints& c)
{
    ConstraintResiduals r;
    r.dependent_variance = std::abs(s.w.dot(m.s_y * s.w) - c.sigma_y2) / c.sigma_y2;
    if (c.l_y)
        r.dependent_sum = std::abs(s.w.sum() - *c.l_y);
    for (Index j = 0; j < m.layout.k(); ++j) {
        const auto om = s.omega.block(j);
        if (const auto& t = c.sigma_x2[at(j)]) {
            const MatrixXd sj = m.s_x_block(j, c.c[at(j)]);
            r.group_variance.emplace_back(std::abs(om.dot(sj * om) - *t) / *t);
        } else {
            r.group_variance.emplace_back(std::nullopt);
        }
        if (const auto& t = c.l_x[at(j)])
            r.group_sum.emplace_back(std::abs(om.sum() - *t));
        else
            r.group_sum.emplace_back(std::nullopt);
    }
    return r;
}

bool needs_flip(const VectorXd& v, bool sum_pinned_to_zero)
{
    const double scale = v.cwiseAbs().sum();
    if (!(scale > 0.0))
        return false;
    const double total = v.sum();
    if (!sum_pinned_to_zero && std::abs(total) > 1e-9 * scale)
        return total < 0.0;
    for (Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > 1e-9 * scale)
            return v(i) < 0.0;
    return false;
}

namespace {

// Block-coordinate fixed-point iteration: each block step solves its
// subproblem exactly, including the multipliers of its own constraints.
class ClarxIteration {
public:
    ClarxIteration(const MomentSet& m, const Constraints& c) : m_(m), c_(c), l_(m.layout) {}

    State initial_state() const;
    void step(State& s);
    bool pseudo_inverse() const { return pinv_; }

private:
    void step_phi_beta(State& s);
    void step_omega(State& s);
    void normalize_omega(State& s) const;
    void step_w(State& s);

    const MomentSet& m_;
    const Constraints& c_;
    const Layout& l_;
    bool pinv_ = false;
};

State ClarxIteration::initial_state() const
{
    State s;
    const Index n = l_.n;
    if (c_.l_y) {
        const QuadSolution q = minimize_quadratic(MatrixXd::Identity(n, n), VectorXd::Ones(n),
                                                  {&m_.s_y, c_.sigma_y2, c_.l_y});
        s.w = q.x;
    } else {
        s.w = VectorXd::Ones(n);
        s.w *= std::sqrt(c_.sigma_y2 / s.w.dot(m_.s_y * s.w));
    }
    const BlockStructure os = l_.omega_structure();
    VectorXd omega(l_.omega_size());
    for (Index j = 0; j < l_.k(); ++j) {
        const Index mj = os.size(j);
        VectorXd oj = VectorXd::Ones(mj);
        const auto& var = c_.sigma_x2[at(j)];
        const auto& sum = c_.l_x[at(j)];
        const MatrixXd sj = m_.s_x_block(j, c_.c[at(j)]);
        if (var && sum) {
            oj = minimize_quadratic(MatrixXd::Identity(mj, mj), oj, {&sj, *var, sum}).x;
        } else if (var) {
            oj *= std::sqrt(*var / oj.dot(sj * oj));
        } else if (sum && *sum != 0.0) {
            oj *= *sum / static_cast<double>(mj);
        } else if (sum) {
            oj = -VectorXd::Constant(mj, 1.0 / static_cast<double>(mj));
            oj(0) += 1.0;
            if (oj.norm() > 0.0)
                oj.normalize();
        } else {
            oj /= std::sqrt(static_cast<double>(mj));
        }
        omega.segment(os.offset(j), mj) = oj;
    }
    s.omega = BlockVec(std::move(omega), os);
    s.phi = VectorXd::Zero(l_.va);
    s.beta = BlockVec(VectorXd::Zero(l_.beta_size()), l_.beta_structure());
    return s;
}

void ClarxIteration::step_phi_beta(State& s)
{
    const StateMatrices sm = state_matrices(l_, s);
    const Index va = l_.va;
    const Index nb = l_.beta_size();
    MatrixXd normal(va + nb, va + nb);
    VectorXd rhs(va + nb);
    if (va > 0) {
        normal.topLeftCorner(va, va) = sm.i_w.transpose() * m_.s_a * sm.i_w;
        rhs.head(va) = sm.i_w.transpose() * m_.s_ay() * s.w;
    }
    if (nb > 0) {
        normal.bottomRightCorner(nb, nb) = sm.i_omega.transpose() * m_.s_x * sm.i_omega;
        rhs.tail(nb) = sm.i_omega.transpose() * m_.s_xy() * s.w;
    }
    if (va > 0 && nb > 0) {
        normal.topRightCorner(va, nb) = sm.i_w.transpose() * m_.s_ax * sm.i_omega;
        normal.bottomLeftCorner(nb, va) = normal.topRightCorner(va, nb).transpose();
    }
    const LinearSolve sol = solve_symmetric(normal, rhs);
    pinv_ = pinv_ || sol.pseudo_inverse;
    s.phi = sol.x.head(va);
    s.beta.data() = sol.x.tail(nb);
}

void ClarxIteration::step_omega(State& s)
{
    if (l_.k() == 0)
        return;
    const StateMatrices sm = state_matrices(l_, s);
    const MatrixXd h = sm.beta_i.transpose() * m_.s_x * sm.beta_i;
    VectorXd v3 = sm.beta_i.transpose() * m_.s_xy() * s.w;
    if (l_.va > 0)
        v3 -= sm.beta_i.transpose() * m_.s_xa() * sm.phi_w;
    const BlockStructure os = l_.omega_structure();

    const bool any_variance = std::any_of(c_.sigma_x2.begin(), c_.sigma_x2.end(), [](const auto& o) { return o.has_value(); });
    if (!any_variance) {
        // Joint solve; sum targets enter as linear equalities.
        std::vector<Index> pinned;
        for (Index j = 0; j < l_.k(); ++j)
            if (c_.l_x[at(j)])
                pinned.push_back(j);
        const Index mo = l_.omega_size();
        const Index np = static_cast<Index>(pinned.size());
        MatrixXd kkt = MatrixXd::Zero(mo + np, mo + np);
        VectorXd rhs = VectorXd::Zero(mo + np);
        kkt.topLeftCorner(mo, mo) = 2.0 * h;
        rhs.head(mo) = 2.0 * v3;
        for (Index p = 0; p < np; ++p) {
            const Index j = pinned[at(p)];
            kkt.block(os.offset(j), mo + p, os.size(j), 1).setOnes();
            kkt.block(mo + p, os.offset(j), 1, os.size(j)).setOnes();
            rhs(mo + p) = *c_.l_x[at(j)];
        }
        const LinearSolve sol = np > 0 ? solve_general(kkt, rhs) : solve_symmetric(h, v3);
        pinv_ = pinv_ || sol.pseudo_inverse;
        s.omega.data() = sol.x.head(mo);
        return;
    }

    for (Index j = 0; j < l_.k(); ++j) {
        const Index off = os.offset(j);
        const Index mj = os.size(j);
        VectorXd b = v3.segment(off, mj) - h.middleRows(off, mj) * s.omega.data() +
                     h.block(off, off, mj, mj) * s.omega.block(j);
        const MatrixXd hjj = h.block(off, off, mj, mj);
        const MatrixXd sj = m_.s_x_block(j, c_.c[at(j)]);
        QuadConstraints qc;
        if (c_.sigma_x2[at(j)]) {
            qc.variance_matrix = &sj;
            qc.variance_target = *c_.sigma_x2[at(j)];
        }
        qc.sum_target = c_.l_x[at(j)];
        const VectorXd hint = s.omega.block(j);
        const QuadSolution q = minimize_quadratic(hjj, b, qc, &hint);
        pinv_ = pinv_ || q.pseudo_inverse;
        s.omega.block(j) = q.x;
    }
}

void ClarxIteration::normalize_omega(State& s) const
{
    for (Index j = 0; j < l_.k(); ++j) {
        auto om = s.omega.block(j);
        auto be = s.beta.block(j);
        const auto& var = c_.sigma_x2[at(j)];
        const auto& sum = c_.l_x[at(j)];
        const bool zero_sum = sum && *sum == 0.0;
        if (!var && (!sum || zero_sum)) {
            const double norm = om.norm();
            if (norm > 0.0) {
                om /= norm;
                be *= norm;
            }
        }
        if (!sum || zero_sum) {
            if (needs_flip(om, zero_sum)) {
                om = -om;
                be = -be;
            }
        }
    }
}

void ClarxIteration::step_w(State& s)
{
    const StateMatrices sm = state_matrices(l_, s);
    MatrixXd q = m_.s_y;
    VectorXd b = VectorXd::Zero(l_.n);
    if (l_.va > 0)
        q -= sm.phi_i.transpose() * m_.s_ay() + m_.s_ya * sm.phi_i - sm.phi_i.transpose() * m_.s_a * sm.phi_i;
    if (l_.k() > 0) {
        b = m_.s_yx * sm.beta_omega;
        if (l_.va > 0)
            b -= sm.phi_i.transpose() * m_.s_ax * sm.beta_omega;
    }
    const VectorXd hint = s.w;
    const QuadSolution sol = minimize_quadratic(q, b, {&m_.s_y, c_.sigma_y2, c_.l_y}, &hint);
    s.w = sol.x;
    const bool zero_sum = c_.l_y && *c_.l_y == 0.0;
    if ((!c_.l_y || zero_sum) && needs_flip(s.w, zero_sum)) {
        s.w = -s.w;
        s.beta.data() = -s.beta.data();
    }
}

void ClarxIteration::step(State& s)
{
    step_phi_beta(s);
    step_omega(s);
    normalize_omega(s);
    step_w(s);
}

double max_change(const State& a, const State& b)
{
    return std::max({max_abs(a.w - b.w), max_abs(a.omega.data() - b.omega.data()), max_abs(a.phi - b.phi),
                     max_abs(a.beta.data() - b.beta.data())});
}

} // namespace

FitResult fit_moments(const MomentSet& m, const Constraints& c, const SolverOptions& opts, const State* start)
{
    const Layout& l = m.layout;
    if (l.k() == 0 && l.va == 0)
        throw Error(Errc::nothing_to_fit, "model has neither autoregressive nor exogenous regressors");
    c.validate(l);

    ClarxIteration iter(m, c);
    State s = start ? *start : iter.initial_state();
    if (start && (s.w.size() != l.n || !(s.omega.structure() == l.omega_structure()) || s.phi.size() != l.va ||
                  !(s.beta.structure() == l.beta_structure())))
        throw Error(Errc::structural, "start state does not match the layout");
    FitResult r;
    r.layout = l;
    r.constraints = c;
    r.initial_objective = objective(m, s);
    double f_prev = r.initial_objective;
    double delta_prev = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opts.max_iter; ++it) {
        const State prev = s;
        iter.step(s);
        const double f = objective(m, s);
        r.iterations = it;
        const double delta = max_change(prev, s);
        const double rel = std::abs(f - f_prev) / std::max(std::abs(f_prev), std::numeric_limits<double>::min());
        f_prev = f;
        if (!std::isfinite(f))
            break;
        // A flat objective only ends the run once the coefficient steps stop shrinking;
        // near the optimum the objective moves quadratically slower than the coefficients.
        if (delta <= opts.tol || (rel <= opts.objective_tol && delta >= delta_prev)) {
            r.converged = true;
            break;
        }
        delta_prev = delta;
    }

    r.w = s.w;
    r.omega = s.omega;
    r.phi = s.phi;
    r.beta = s.beta;
    r.c = intercept(m, s);
    r.objective = objective(m, s);
    r.pseudo_inverse_used = iter.pseudo_inverse();
    const DependentMultipliers dm = update_dependent_multipliers(m, s, c);
    const ExplanatoryMultipliers em = update_explanatory_multipliers(m, s, c);
    r.multipliers = {dm.rho_y, dm.rho_l, em.lambda_x, em.lambda_p};
    r.pseudo_inverse_used = r.pseudo_inverse_used || em.pseudo_inverse;
    r.residuals = constraint_residuals(m, s, c);
    return r;
}

FitResult fit(const Dataset& data, const Constraints& c, const SolverOptions& opts)
{
    return fit_moments(data.moments(), c, opts);
}

FitResult fit(const Dataset& data, const ModelSpec& spec)
{
    return fit(data, Constraints::from_spec(spec), spec.solver);
}

Prediction predict(const FitResult& f, const Dataset& data)
{
    if (!(f.layout == data.layout))
        throw Error(Errc::structural, "dataset layout does not match the fit");
    const StateMatrices sm = state_matrices(f.layout, f.state());
    Prediction p;
    p.latent = data.y * f.w;
    p.fitted = VectorXd::Constant(data.rows(), f.c);
    if (f.layout.va > 0)
        p.fitted += data.a * sm.phi_w;
    if (f.layout.k() > 0)
        p.fitted += data.x * sm.beta_omega;
    p.residuals = p.latent - p.fitted;
    return p;
}

} // namespace larx
