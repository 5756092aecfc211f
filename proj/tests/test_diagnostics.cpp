#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "larx/diagnostics.hpp"
#include "larx/error.hpp"
#include "support.hpp"

#include <cmath>

using namespace larx;
using testsupport::gaussian;
using testsupport::latent_problem;
using testsupport::uniform_index;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

struct Packed {
    VectorXd x;
    Index nw, no, np, nb;
};

Packed pack(const State& s)
{
    Packed p{VectorXd(s.w.size() + s.omega.data().size() + s.phi.size() + s.beta.data().size()), s.w.size(), s.omega.data().size(),
             s.phi.size(), s.beta.data().size()};
    p.x << s.w, s.omega.data(), s.phi, s.beta.data();
    return p;
}

State unpack(const Packed& p, const VectorXd& x, const State& like)
{
    State s = like;
    s.w = x.head(p.nw);
    s.omega.data() = x.segment(p.nw, p.no);
    s.phi = x.segment(p.nw + p.no, p.np);
    s.beta.data() = x.tail(p.nb);
    return s;
}

} // namespace

TEST_CASE("coefficient names")
{
    CHECK(parse_coefficient("omega") == Coefficient::omega);
    CHECK(coefficient_name(Coefficient::phi) == "phi");
    try {
        parse_coefficient("gamma");
        FAIL("expected unknown_coefficient");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unknown_coefficient);
    }
}

TEST_CASE("objective equals the weighted residual variance")
{
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 10; ++trial) {
        const Layout l{uniform_index(rng, 1, 3), uniform_index(rng, 0, 2), {{2, 2}, {1, 3}}};
        const auto p = latent_problem(rng, l, 50, 0.1, 9.0);
        const FitResult f = fit(p.data, Constraints::unconstrained(l, 1.0));
        const VectorXd r = predict(f, p.data).residuals;
        const VectorXd& w = p.data.weights.values();
        const double mean = w.dot(r);
        const double var = w.dot((r.array() - mean).square().matrix());
        CHECK(f.objective == doctest::Approx(var).epsilon(1e-10));
    }
}

TEST_CASE("analytic Lagrangian gradient matches central differences")
{
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const Layout l{uniform_index(rng, 2, 3), uniform_index(rng, 0, 2),
                       {{uniform_index(rng, 2, 3), uniform_index(rng, 1, 3)}, {uniform_index(rng, 2, 3), 1}}};
        const auto p = latent_problem(rng, l, 60, 0.2, 12.0);
        const MomentSet m = p.data.moments();
        State s;
        s.w = gaussian(rng, l.n, 1).col(0);
        s.omega = BlockVec(gaussian(rng, l.omega_size(), 1).col(0), l.omega_structure());
        s.phi = gaussian(rng, l.va, 1).col(0);
        s.beta = BlockVec(gaussian(rng, l.beta_size(), 1).col(0), l.beta_structure());
        Constraints c = Constraints::unconstrained(l, 1.3);
        c.l_y = 0.5;
        c.sigma_x2 = {0.7, std::nullopt};
        c.l_x = {1.0, 0.0};
        c.c = {l.groups[0].versions - 1, 0};
        const Multipliers mult{0.4 + trial * 0.1, -0.3, gaussian(rng, 2, 1).col(0), gaussian(rng, 2, 1).col(0)};

        const LagrangianGradient g = lagrangian_gradient(m, s, mult, c);
        VectorXd analytic(g.w.size() + g.omega.size() + g.phi.size() + g.beta.size());
        analytic << g.w, g.omega, g.phi, g.beta;

        const Packed pk = pack(s);
        VectorXd numeric(pk.x.size());
        for (Index i = 0; i < pk.x.size(); ++i) {
            const double h = 1e-6 * std::max(1.0, std::abs(pk.x(i)));
            VectorXd up = pk.x, dn = pk.x;
            up(i) += h;
            dn(i) -= h;
            numeric(i) = (lagrangian(m, unpack(pk, up, s), mult, c) - lagrangian(m, unpack(pk, dn, s), mult, c)) / (2.0 * h);
        }
        CHECK((analytic - numeric).norm() <= 1e-6 * analytic.norm());
    }
}

TEST_CASE("gradient vanishes at an unconstrained fit and grows under perturbation")
{
    std::mt19937_64 rng(3);
    const Layout l{3, 1, {{3, 2}}};
    const auto p = latent_problem(rng, l, 100, 0.05);
    const MomentSet m = p.data.moments();
    const FitResult f = fit(p.data, Constraints::unconstrained(l, 1.0));
    REQUIRE(f.converged);
    const LagrangianGradient g = lagrangian_gradient(f, m);
    CHECK(g.max_relative() <= 1e-8);
    State moved = f.state();
    moved.w.array() += 1e-2;
    const LagrangianGradient gm = lagrangian_gradient(m, moved, f.multipliers, f.constraints);
    CHECK(gm.w.norm() > g.w.norm());
}

TEST_CASE("OLS view on a non-latent model is the plain ARX regression")
{
    std::mt19937_64 rng(4);
    const Layout l{1, 1, {{1, 2}, {1, 1}}};
    const auto p = latent_problem(rng, l, 80, 0.2, 20.0);
    const FitResult f = fit(p.data, Constraints::unconstrained(l, 1.0));
    const OlsView v = ols_view(f, p.data, Coefficient::beta);
    CHECK(v.agreement_gap <= 1e-8);
    // B = X(I_β⊙ω) with ω = 1, a = Yŵ - A(φ⊗ŵ).
    const auto ols = testsupport::wls(p.data.y.col(0) * f.w(0) - p.data.a * f.phi * f.w(0), p.data.x,
                                      p.data.weights.values());
    CHECK((v.ols_coefficients - ols.slopes).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(v.ols_intercept == doctest::Approx(ols.intercept).epsilon(1e-10));
}

TEST_CASE("OLS view of w under a variance constraint is informational")
{
    std::mt19937_64 rng(5);
    const Layout l{3, 1, {{2, 1}}};
    const auto p = latent_problem(rng, l, 80, 0.2);
    const FitResult f = fit(p.data, Constraints::unconstrained(l, 1.0));
    const OlsView v = ols_view(f, p.data, Coefficient::w);
    CHECK(v.ols_coefficients.size() == 3);
    CHECK(std::isfinite(v.agreement_gap));
}

TEST_CASE("conditional standard errors")
{
    // Orthogonal unit-variance columns, unit residual variance after DoF correction.
    const Index s = 8;
    MatrixXd b(s, 2);
    b << 1, 1, 1, -1, -1, 1, -1, -1, 1, 1, 1, -1, -1, 1, -1, -1;
    VectorXd e(s);
    e << 1, -1, -1, 1, -1, 1, 1, -1;   // orthogonal to 1 and both columns
    e *= std::sqrt((s - 3.0) / static_cast<double>(s));
    OlsView v;
    v.b = b;
    v.a = b * Eigen::Vector2d(0.5, -2.0) + e;
    v.a.array() += 3.0;
    v.weights = exp_decay_weights(s, inf);
    v.ols_coefficients = Eigen::Vector2d(0.5, -2.0);
    v.ols_intercept = 3.0;
    const VectorXd se = conditional_stderr(v);
    CHECK(se(0) == doctest::Approx(1.0 / std::sqrt(static_cast<double>(s))).epsilon(1e-12));
    CHECK(se(1) == doctest::Approx(1.0 / std::sqrt(static_cast<double>(s))).epsilon(1e-12));

    // Textbook (B'B)^{-1} σ̂² with an explicit intercept column.
    std::mt19937_64 rng(6);
    const MatrixXd x = gaussian(rng, 40, 3);
    const VectorXd y = x * Eigen::Vector3d(1, 2, 3) + gaussian(rng, 40, 1).col(0);
    const auto ols = testsupport::wls(y, x, VectorXd::Ones(40));
    OlsView t;
    t.a = y;
    t.b = x;
    t.weights = exp_decay_weights(40, inf);
    t.ols_coefficients = ols.slopes;
    t.ols_intercept = ols.intercept;
    MatrixXd d(40, 4);
    d << VectorXd::Ones(40), x;
    const double s2 = (y - ols.fitted).squaredNorm() / (40.0 - 4.0);
    const VectorXd expect = ((d.transpose() * d).inverse().diagonal().tail(3) * s2).cwiseSqrt();
    CHECK((conditional_stderr(t) - expect).cwiseAbs().maxCoeff() <= 1e-12);

    // Duplicate regressor.
    OlsView dup = t;
    dup.b.col(2) = dup.b.col(1);
    CHECK_THROWS_AS(conditional_stderr(dup), Error);
}
