#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "larx/error.hpp"
#include "larx/moments.hpp"
#include "support.hpp"

#include <cmath>
#include <limits>

using namespace larx;
using testsupport::gaussian;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();

WeightVector random_weights(std::mt19937_64& rng, Index s)
{
    std::uniform_real_distribution<double> u(0.1, 1.0);
    VectorXd raw(s);
    for (Index i = 0; i < s; ++i)
        raw(i) = u(rng);
    return WeightVector(raw);
}
} // namespace

TEST_CASE("exp_decay_weights examples")
{
    const auto w = exp_decay_weights(3, 1.0);
    CHECK(w.values()(0) == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
    CHECK(w.values()(1) == doctest::Approx(2.0 / 7.0).epsilon(1e-15));
    CHECK(w.values()(2) == doctest::Approx(4.0 / 7.0).epsilon(1e-15));
    const auto e = exp_decay_weights(4, inf);
    for (Index i = 0; i < 4; ++i)
        CHECK(e.values()(i) == 0.25);
    const auto two = exp_decay_weights(2, 1.0);
    CHECK(two.values()(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(two.values()(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(exp_decay_weights(0, 1.0), Error);
}

TEST_CASE("weights are normalized and nondecreasing")
{
    for (Index s : {1, 5, 37, 200})
        for (double hl : {0.5, 4.0, 40.0, inf}) {
            const auto w = exp_decay_weights(s, hl);
            CHECK(std::abs(w.values().sum() - 1.0) <= 1e-12);
            for (Index t = 1; t < s; ++t)
                CHECK(w.values()(t) >= w.values()(t - 1));
        }
}

TEST_CASE("weighted_mean examples")
{
    MatrixXd m(2, 1);
    m << 1, 3;
    CHECK(weighted_mean(m, exp_decay_weights(2, inf))(0) == 2.0);

    std::mt19937_64 rng(1);
    const MatrixXd r = gaussian(rng, 6, 3);
    VectorXd last = VectorXd::Zero(6);
    last(5) = 1.0;
    CHECK(weighted_mean(r, WeightVector(last)) == r.row(5));

    const WeightVector w = random_weights(rng, 6);
    const auto got = weighted_mean(r, w);
    for (Index j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (Index t = 0; t < 6; ++t)
            acc += w.values()(t) * r(t, j);
        CHECK(got(j) == doctest::Approx(acc).epsilon(1e-14));
    }
    CHECK_THROWS_AS(weighted_mean(r, exp_decay_weights(5, inf)), Error);
}

TEST_CASE("weighted_cov examples")
{
    MatrixXd a(2, 1);
    a << 1, -1;
    CHECK(weighted_cov(a, a, exp_decay_weights(2, inf))(0, 0) == 1.0);

    std::mt19937_64 rng(2);
    MatrixXd b = gaussian(rng, 5, 2);
    b.col(1).setConstant(3.0);
    const MatrixXd c = weighted_cov(gaussian(rng, 5, 2), b, exp_decay_weights(5, 2.0));
    CHECK(c.col(1).cwiseAbs().maxCoeff() <= 1e-15);

    const MatrixXd x = gaussian(rng, 9, 3), y = gaussian(rng, 9, 2);
    const WeightVector w = random_weights(rng, 9);
    const MatrixXd got = weighted_cov(x, y, w);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 2; ++j) {
            double mx = 0, my = 0;
            for (Index t = 0; t < 9; ++t) {
                mx += w.values()(t) * x(t, i);
                my += w.values()(t) * y(t, j);
            }
            double acc = 0;
            for (Index t = 0; t < 9; ++t)
                acc += w.values()(t) * (x(t, i) - mx) * (y(t, j) - my);
            CHECK(got(i, j) == doctest::Approx(acc).epsilon(1e-12));
        }
    CHECK_THROWS_AS(weighted_cov(MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1), exp_decay_weights(1, inf)), Error);
}

TEST_CASE("covariance properties")
{
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const Index s = testsupport::uniform_index(rng, 2, 40);
        const MatrixXd a = gaussian(rng, s, 4), b = gaussian(rng, s, 3);
        const WeightVector w = random_weights(rng, s);
        const MatrixXd aa = weighted_cov(a, a, w);
        CHECK(aa == aa.transpose());
        CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(aa).eigenvalues().minCoeff() >= -1e-10);
        CHECK(weighted_cov(a, b, w).transpose() == weighted_cov(b, a, w));
    }
    // Equal weights give the population covariance.
    const MatrixXd a = gaussian(rng, 12, 2);
    const MatrixXd ac = a.rowwise() - a.colwise().mean();
    const MatrixXd pop = ac.transpose() * ac / 12.0;
    CHECK((weighted_cov(a, a, exp_decay_weights(12, inf)) - pop).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("build_moment_set")
{
    std::mt19937_64 rng(6);
    const Index s = 50;
    const Layout single{2, 0, {{3, 1}}};
    const MatrixXd y = gaussian(rng, s, 2), x = gaussian(rng, s, 3);
    const auto w = exp_decay_weights(s, 10.0);
    const MomentSet m = build_moment_set(y, MatrixXd(s, 0), x, single, w);
    CHECK(m.s_x_diag == m.s_x);
    CHECK(m.s_a.size() == 0);
    CHECK(m.s_ya.cols() == 0);

    // Two centered orthogonal columns: off-diagonal block vanishes.
    MatrixXd xo(4, 2);
    xo << 1, 1, -1, 1, 1, -1, -1, -1;
    const Layout two{1, 0, {{1, 2}}};
    const MomentSet mo = build_moment_set(gaussian(rng, 4, 1), MatrixXd(4, 0), xo, two, exp_decay_weights(4, inf));
    CHECK(std::abs(mo.s_x(0, 1)) <= 1e-15);
    CHECK((mo.s_x_diag - mo.s_x).cwiseAbs().maxCoeff() <= 1e-15);

    // Σ^d_X keeps exactly the (variable, version) diagonal blocks.
    const Layout lay{1, 1, {{2, 2}, {1, 3}}};
    const MomentSet mm = build_moment_set(gaussian(rng, s, 1), gaussian(rng, s, 1), gaussian(rng, s, 7), lay, w);
    const BlockStructure xs = lay.x_structure();
    for (Index i = 0; i < xs.count(); ++i)
        for (Index j = 0; j < xs.count(); ++j) {
            const auto blk = mm.s_x_diag.block(xs.offset(i), xs.offset(j), xs.size(i), xs.size(j));
            if (i == j)
                CHECK(blk == mm.s_x.block(xs.offset(i), xs.offset(j), xs.size(i), xs.size(j)));
            else
                CHECK(blk.cwiseAbs().maxCoeff() == 0.0);
        }
    CHECK(mm.s_ay() == mm.s_ya.transpose());

    MatrixXd bad = gaussian(rng, s, 2);
    bad.col(1).setConstant(0.37);
    try {
        build_moment_set(bad, MatrixXd(s, 0), x, Layout{2, 0, {{3, 1}}}, w);
        FAIL("expected zero-variance error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::zero_variance);
    }
}

TEST_CASE("circular lag moments match exactly")
{
    std::mt19937_64 rng(8);
    const MatrixXd y = gaussian(rng, 30, 3);
    const MomentSet m = build_circular_lag_moments(y);
    CHECK(m.s_a == m.s_y);
    CHECK(m.layout.va == 1);
}
