#include "larx/diagnostics.hpp"

#include "larx/error.hpp"
#include "larx/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>

namespace larx {

namespace {

std::size_t at(Index j) { return static_cast<std::size_t>(j); }

struct Wls {
    VectorXd slopes;
    double intercept = 0.0;
};

// Weighted OLS with intercept through the centered normal equations.
Wls weighted_ols(const VectorXd& a, const MatrixXd& b, const WeightVector& w)
{
    const MatrixXd bm = b;
    const MatrixXd am = a;
    const MatrixXd sbb = weighted_cov(bm, bm, w);
    const VectorXd sba = weighted_cov(bm, am, w).col(0);
    Wls out;
    out.slopes = b.cols() ? solve_symmetric(sbb, sba).x : VectorXd(0);
    out.intercept = weighted_mean(am, w)(0) - weighted_mean(bm, w).dot(out.slopes);
    return out;
}

double relative(const VectorXd& total, std::initializer_list<const VectorXd*> parts)
{
    const double g = total.norm();
    if (total.size() == 0 || g == 0.0)
        return 0.0;
    double scale = 0.0;
    for (const VectorXd* p : parts)
        scale += p->norm();
    return g / scale;
}

} // namespace

Coefficient parse_coefficient(std::string_view name)
{
    if (name == "w")
        return Coefficient::w;
    if (name == "phi")
        return Coefficient::phi;
    if (name == "omega")
        return Coefficient::omega;
    if (name == "beta")
        return Coefficient::beta;
    throw Error(Errc::unknown_coefficient, "unknown coefficient '" + std::string(name) + "'");
}

std::string_view coefficient_name(Coefficient c)
{
    switch (c) {
    case Coefficient::w: return "w";
    case Coefficient::phi: return "phi";
    case Coefficient::omega: return "omega";
    case Coefficient::beta: return "beta";
    }
    return "?";
}

OlsView ols_view(const FitResult& fit, const Dataset& data, Coefficient which)
{
    if (!(fit.layout == data.layout))
        throw Error(Errc::structural, "dataset layout does not match the fit");
    const Layout& l = fit.layout;
    const StateMatrices sm = state_matrices(l, fit.state());
    const Index s = data.rows();
    const VectorXd xb = l.k() ? VectorXd(data.x * sm.beta_omega) : VectorXd::Zero(s);
    const VectorXd apw = l.va ? VectorXd(data.a * sm.phi_w) : VectorXd::Zero(s);
    const VectorXd yw = data.y * fit.w;

    OlsView v;
    v.which = which;
    v.weights = data.weights;
    switch (which) {
    case Coefficient::w:
        v.a = xb;
        v.b = l.va ? MatrixXd(data.y - data.a * sm.phi_i) : data.y;
        v.fit_coefficients = fit.w;
        break;
    case Coefficient::phi:
        v.a = yw - xb;
        v.b = data.a * sm.i_w;
        v.fit_coefficients = fit.phi;
        break;
    case Coefficient::omega:
        v.a = yw - apw;
        v.b = l.k() ? MatrixXd(data.x * sm.beta_i) : MatrixXd(s, 0);
        v.fit_coefficients = fit.omega.data();
        break;
    case Coefficient::beta:
        v.a = yw - apw;
        v.b = l.k() ? MatrixXd(data.x * sm.i_omega) : MatrixXd(s, 0);
        v.fit_coefficients = fit.beta.data();
        break;
    }
    const Wls r = weighted_ols(v.a, v.b, v.weights);
    v.ols_coefficients = r.slopes;
    v.ols_intercept = r.intercept;
    v.agreement_gap = v.fit_coefficients.size()
                          ? (v.fit_coefficients - v.ols_coefficients).cwiseAbs().maxCoeff()
                          : 0.0;
    return v;
}

VectorXd conditional_stderr(const OlsView& view)
{
    const Index p = view.b.cols();
    const double n_eff = view.weights.effective_size();
    if (n_eff <= static_cast<double>(p + 1))
        throw Error(Errc::degenerate_sample, "effective sample too small for standard errors");
    const MatrixXd sbb = weighted_cov(view.b, view.b, view.weights);
    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sbb);
    const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (p > 0 && !(eig.eigenvalues().minCoeff() > top / kConditionLimit))
        throw Error(Errc::singular_matrix, "conditional regression has a singular normal matrix");
    const VectorXd e = (view.a - view.b * view.ols_coefficients).array() - view.ols_intercept;
    const double s2 = view.weights.values().dot(e.cwiseAbs2()) * n_eff / (n_eff - static_cast<double>(p + 1));
    const MatrixXd inv = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                         eig.eigenvectors().transpose();
    return (inv.diagonal() * s2 / n_eff).cwiseSqrt();
}

double lagrangian(const MomentSet& m, const State& s, const Multipliers& mult, const Constraints& c)
{
    double v = objective(m, s);
    v += (mult.rho_y - 1.0) * (s.w.dot(m.s_y * s.w) - c.sigma_y2);
    if (c.l_y)
        v += 2.0 * mult.rho_l * (s.w.sum() - *c.l_y);
    for (Index j = 0; j < m.layout.k(); ++j) {
        const auto om = s.omega.block(j);
        if (const auto& t = c.sigma_x2[at(j)]; t && mult.lambda_x.size())
            v += mult.lambda_x(j) * (om.dot(m.s_x_block(j, c.c[at(j)]) * om) - *t);
        if (const auto& t = c.l_x[at(j)]; t && mult.lambda_p.size())
            v += mult.lambda_p(j) * (om.sum() - *t);
    }
    return v;
}

double LagrangianGradient::max_relative() const
{
    return std::max({rel_w, rel_omega, rel_phi, rel_beta});
}

LagrangianGradient lagrangian_gradient(const MomentSet& m, const State& s, const Multipliers& mult,
                                       const Constraints& c)
{
    const Layout& l = m.layout;
    const StateMatrices sm = state_matrices(l, s);
    const Index n = l.n;
    const bool has_a = l.va > 0;
    const bool has_x = l.k() > 0;

    // Each gradient splits into a part quadratic in its own block, a part linear
    // in it, and the constraint terms; the relative norm is taken against their sum.
    const MatrixXd cw = has_a ? MatrixXd(m.s_y + sm.phi_i.transpose() * m.s_a * sm.phi_i -
                                         sm.phi_i.transpose() * m.s_ay() - m.s_ya * sm.phi_i)
                              : m.s_y;
    VectorXd v2 = VectorXd::Zero(n);
    if (has_x) {
        v2 = m.s_yx * sm.beta_omega;
        if (has_a)
            v2 -= sm.phi_i.transpose() * m.s_ax * sm.beta_omega;
    }

    LagrangianGradient g;
    const VectorXd quad_w = 2.0 * cw * s.w;
    const VectorXd lin_w = -2.0 * v2;
    VectorXd con_w = 2.0 * (mult.rho_y - 1.0) * (m.s_y * s.w);
    if (c.l_y)
        con_w += 2.0 * mult.rho_l * VectorXd::Ones(n);
    g.w = quad_w + lin_w + con_w;
    g.rel_w = relative(g.w, {&quad_w, &lin_w, &con_w});

    if (has_a) {
        const VectorXd quad = 2.0 * sm.i_w.transpose() * m.s_a * sm.i_w * s.phi;
        VectorXd rhs = m.s_ay() * s.w;
        if (has_x)
            rhs -= m.s_ax * sm.beta_omega;
        const VectorXd lin = -2.0 * sm.i_w.transpose() * rhs;
        g.phi = quad + lin;
        g.rel_phi = relative(g.phi, {&quad, &lin});
    } else {
        g.phi = VectorXd(0);
    }

    if (has_x) {
        VectorXd rhs = m.s_xy() * s.w;
        if (has_a)
            rhs -= m.s_xa() * sm.phi_w;
        const VectorXd sxb = m.s_x * sm.beta_omega;

        const VectorXd quad_o = 2.0 * sm.beta_i.transpose() * sxb;
        const VectorXd lin_o = -2.0 * sm.beta_i.transpose() * rhs;
        VectorXd con_o = VectorXd::Zero(l.omega_size());
        const BlockStructure os = l.omega_structure();
        for (Index j = 0; j < l.k(); ++j) {
            const auto om = s.omega.block(j);
            auto seg = con_o.segment(os.offset(j), os.size(j));
            if (c.sigma_x2[at(j)] && mult.lambda_x.size())
                seg += 2.0 * mult.lambda_x(j) * (m.s_x_block(j, c.c[at(j)]) * om);
            if (c.l_x[at(j)] && mult.lambda_p.size())
                seg.array() += mult.lambda_p(j);
        }
        g.omega = quad_o + lin_o + con_o;
        g.rel_omega = relative(g.omega, {&quad_o, &lin_o, &con_o});

        const VectorXd quad_b = 2.0 * sm.i_omega.transpose() * sxb;
        const VectorXd lin_b = -2.0 * sm.i_omega.transpose() * rhs;
        g.beta = quad_b + lin_b;
        g.rel_beta = relative(g.beta, {&quad_b, &lin_b});
    } else {
        g.omega = VectorXd(0);
        g.beta = VectorXd(0);
    }
    return g;
}

LagrangianGradient lagrangian_gradient(const FitResult& fit, const MomentSet& m)
{
    return lagrangian_gradient(m, fit.state(), fit.multipliers, fit.constraints);
}

} // namespace larx
