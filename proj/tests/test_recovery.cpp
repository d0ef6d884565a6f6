#include <doctest.h>

#include <cmath>
#include <sstream>
#include <future>

#include "lorgeo/recovery.hpp"
#include "lorgeo/random.hpp"
#include "testutil.hpp"

using namespace lorgeo;
using lorgeo_test::vec;

namespace {

MetricField offdiag_field() {
    return MetricField::general(
        {{{0, 0}, Expr::constant(1.0)}, {{0, 1}, Expr::constant(0.3)}, {{1, 1}, Expr::constant(-1.0)}},
        1, Box::cube(1, -10, 10), "offdiag-03");
}

MetricField conformal_bump(int n, double box_half = 20.0) {
    std::string arg = "x1^2";
    for (int i = 2; i <= n; ++i) arg += "+x" + std::to_string(i) + "^2";
    return MetricField::conformal(Expr::parse("1+0.5*exp(-(" + arg + "))", n), n,
                                  Box::cube(n, -box_half, box_half));
}

// Builds a table covering exactly the recovery query set for one point.
LengthOracle table_for_point(const MetricField& field, const Vector& y, double eps, double T) {
    const int d = field.n() + 1;
    Vector e0 = Vector::Zero(d);
    e0[0] = 1.0;
    const Covector seed = Covector::from_full(e0);
    std::vector<LengthSample> rows;
    const LengthOracle cf = LengthOracle::closed_form(field);
    for (const auto& q : polarization_queries(d, seed, eps)) {
        rows.push_back(cf.query(SpacetimePoint::spatial(y), q, T));
    }
    return LengthOracle::table(std::move(rows), field.n());
}

}  // namespace

TEST_SUITE("recovery") {

TEST_CASE("measured form inverts the closed-form length") {
    const LengthOracle mink =
        LengthOracle::closed_form(MetricField::minkowski(2, Box::cube(2, -5, 5)));
    const SpacetimePoint y = SpacetimePoint::spatial(vec({0.0, 0.0}));
    CHECK(measured_form(mink, y, Covector(1.0, vec({0.0, 0.0})), 1.0) == doctest::Approx(1.0));
    // 2H = 4 - 1 - 1 = 2, independent of T
    for (double T : {0.5, 1.0, 2.0}) {
        CHECK(measured_form(mink, y, Covector(2.0, vec({1.0, 1.0})), T) ==
              doctest::Approx(2.0).epsilon(1e-10));
    }
    const double q05 = measured_form(mink, y, Covector(2.0, vec({1.0, 1.0})), 0.5);
    const double q2 = measured_form(mink, y, Covector(2.0, vec({1.0, 1.0})), 2.0);
    CHECK(std::abs(q05 - q2) <= 1e-10 * std::abs(q2));
}

TEST_CASE("seed search hits the time axis first") {
    const LengthOracle mink =
        LengthOracle::closed_form(MetricField::minkowski(1, Box::cube(1, -5, 5)));
    const Covector a = find_timelike_seed(mink, SpacetimePoint::spatial(vec({0.0})));
    CHECK(a.eta0 == 1.0);
    CHECK(a.eta[0] == 0.0);

    const LengthOracle diag = LengthOracle::closed_form(MetricField::diagonal(
        {Expr::constant(2.0), Expr::constant(-1.0)}, Box::cube(1, -5, 5)));
    const SpacetimePoint y = SpacetimePoint::spatial(vec({0.0}));
    const Covector ad = find_timelike_seed(diag, y);
    CHECK(measured_form(diag, y, ad, 1.0) == doctest::Approx(2.0));
}

TEST_CASE("seed search fails loudly on data with no timelike direction") {
    // table containing only a spacelike-looking sample: every probe misses
    std::vector<LengthSample> rows;
    rows.push_back({SpacetimePoint::spatial(vec({0.0})), Covector(0.0, vec({1.0})), 1.0, 0.5});
    const LengthOracle table = LengthOracle::table(rows, 1);
    CHECK_THROWS_AS(find_timelike_seed(table, SpacetimePoint::spatial(vec({0.0}))),
                    NoTimelikeDirection);
}

TEST_CASE("exact recovery over closed-form oracles") {
    const MetricField mink2 = MetricField::minkowski(2, Box::cube(2, -5, 5));
    const auto r = recover_inverse_metric_at(LengthOracle::closed_form(mink2),
                                             SpacetimePoint::spatial(vec({0.7, -0.3})));
    Matrix expected = Matrix::Zero(3, 3);
    expected(0, 0) = 1.0;
    expected(1, 1) = -1.0;
    expected(2, 2) = -1.0;
    CHECK((r.Q.matrix() - expected).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((r.Q.matrix() * r.Qinv.matrix() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <=
          1e-9);
    CHECK(r.residual <= 1e-12);

    const MetricField f = offdiag_field();
    const auto r2 = recover_inverse_metric_at(LengthOracle::closed_form(f),
                                              SpacetimePoint::spatial(vec({1.2})));
    CHECK(std::abs(r2.Q(0, 1) - 0.3) <= 1e-12);
    CHECK(std::abs(r2.Q(0, 0) - 1.0) <= 1e-12);
    CHECK(std::abs(r2.Q(1, 1) + 1.0) <= 1e-12);
}

TEST_CASE("recovery through the quadrature oracle matches the field") {
    const MetricField f = conformal_bump(1);
    const LengthOracle oracle = LengthOracle::quadrature(f);
    const Vector y = vec({0.3});
    const auto r = recover_inverse_metric_at(oracle, SpacetimePoint::spatial(y));
    const Matrix truth = f.evaluate_inverse_metric(y).matrix();
    CHECK((r.Q.matrix() - truth).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("recovered form is independent of epsilon and T for exact oracles") {
    const MetricField f = offdiag_field();
    const LengthOracle oracle = LengthOracle::closed_form(f);
    const SpacetimePoint y = SpacetimePoint::spatial(vec({0.0}));
    RecoveryOptions a, b;
    a.epsilon = 1e-2;
    b.epsilon = 5e-3;
    const auto ra = recover_inverse_metric_at(oracle, y, a);
    const auto rb = recover_inverse_metric_at(oracle, y, b);
    CHECK((ra.Q.matrix() - rb.Q.matrix()).cwiseAbs().maxCoeff() <= 1e-10);

    RecoveryOptions t1, t2;
    t1.T = 0.5;
    t2.T = 2.0;
    const auto rt1 = recover_inverse_metric_at(oracle, y, t1);
    const auto rt2 = recover_inverse_metric_at(oracle, y, t2);
    CHECK((rt1.Q.matrix() - rt2.Q.matrix()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("equal data gives equal recovered forms") {
    // the same metric presented through two different constructors
    const MetricField a = MetricField::minkowski(1, Box::cube(1, -5, 5));
    const MetricField b = MetricField::general(
        {{{0, 0}, Expr::constant(1.0)}, {{1, 1}, Expr::constant(-1.0)}}, 1, Box::cube(1, -5, 5));
    const SpacetimePoint y = SpacetimePoint::spatial(vec({0.4}));
    const auto ra = recover_inverse_metric_at(LengthOracle::closed_form(a), y);
    const auto rb = recover_inverse_metric_at(LengthOracle::closed_form(b), y);
    CHECK((ra.Q.matrix() - rb.Q.matrix()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("recovery from a stored table and least-squares mode") {
    const MetricField f = offdiag_field();
    const Vector y = vec({0.0});
    RecoveryOptions opts;  // defaults: eps 1e-2, T = 1
    const LengthOracle table = table_for_point(f, y, opts.epsilon, opts.T);
    const auto r = recover_inverse_metric_at(table, SpacetimePoint::spatial(y), opts);
    CHECK(std::abs(r.Q(0, 1) - 0.3) <= 1e-10);

    RecoveryOptions ls;
    ls.fit = RecoveryOptions::Fit::LeastSquares;
    const auto rls =
        recover_inverse_metric_at(LengthOracle::closed_form(f), SpacetimePoint::spatial(y), ls);
    CHECK((rls.Q.matrix() - r.Q.matrix()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("region recovery isolates per-point failures") {
    const MetricField mink = MetricField::minkowski(1, Box::cube(1, -5, 5));
    // closed-form grid: every point identical
    const auto ok = recover_on_region(LengthOracle::closed_form(mink),
                                      {vec({-1.0}), vec({0.0}), vec({1.0}), vec({2.0}), vec({-2.0})});
    CHECK(ok.size() == 5);
    for (const auto& p : ok) {
        REQUIRE(p.ok());
        CHECK(std::abs(p.point->Q(0, 0) - 1.0) <= 1e-12);
        CHECK(std::abs(p.point->Q(1, 1) + 1.0) <= 1e-12);
    }

    // table covers two of three points
    RecoveryOptions opts;
    std::vector<LengthSample> rows;
    const LengthOracle cf = LengthOracle::closed_form(mink);
    for (const Vector& y : {vec({0.1}), vec({0.2})}) {
        Vector e0 = vec({1.0, 0.0});
        for (const auto& q : polarization_queries(2, Covector::from_full(e0), opts.epsilon)) {
            rows.push_back(cf.query(SpacetimePoint::spatial(y), q, opts.T));
        }
    }
    const LengthOracle table = LengthOracle::table(rows, 1);
    const auto mixed = recover_on_region(table, {vec({0.1}), vec({0.2}), vec({0.3})}, opts);
    CHECK(mixed[0].ok());
    CHECK(mixed[1].ok());
    CHECK_FALSE(mixed[2].ok());
    CHECK_FALSE(mixed[2].error.empty());
}

TEST_CASE("conformal region recovery tracks the conformal factor") {
    const MetricField f = conformal_bump(1);
    const LengthOracle oracle = LengthOracle::closed_form(f);
    const auto rs = recover_on_region(oracle, {vec({-1.0}), vec({0.0}), vec({1.0})});
    for (const auto& p : rs) {
        REQUIRE(p.ok());
        const double c = 1.0 + 0.5 * std::exp(-p.y[0] * p.y[0]);
        CHECK(std::abs(p.point->Q(0, 0) - c) <= 1e-6);
        CHECK(std::abs(p.point->Q(1, 1) + c) <= 1e-6);
    }
}

TEST_CASE("boundary jet of a constant metric vanishes") {
    const LengthOracle mink =
        LengthOracle::closed_form(MetricField::minkowski(1, Box::cube(1, -5, 5)));
    const BoundaryJet jet = recover_boundary_jet(mink, vec({0.0}), vec({1.0}));
    for (const auto& e : jet.entries) {
        int total = 0;
        for (int a : e.alpha) total += a;
        if (total == 0) continue;
        CHECK(e.value.max_abs() <= 1e-7);
    }
}

TEST_CASE("boundary jet first derivative of a linear conformal factor") {
    // c = 1 + x1: d g^{00}/dx1 = 1, d g^{11}/dx1 = -1
    const MetricField f = MetricField::conformal(Expr::parse("1+x1", 1), 1,
                                                 Box(std::vector<std::array<double, 2>>{{-0.5, 5.0}}));
    const LengthOracle oracle = LengthOracle::closed_form(f);
    BoundaryJetOptions opts;
    opts.order = 1;
    const BoundaryJet jet = recover_boundary_jet(oracle, vec({0.0}), vec({1.0}), opts);
    const SymmetricForm& d1 = jet.at({1});
    CHECK(std::abs(d1(0, 0) - 1.0) <= 5e-5);
    CHECK(std::abs(d1(1, 1) + 1.0) <= 5e-5);
}

TEST_CASE("boundary jet second derivatives of the even conformal bump") {
    // c = 1 + 0.5 exp(-x1^2): c'(0) = 0, c''(0) = -1
    const MetricField f = conformal_bump(1);
    const LengthOracle oracle = LengthOracle::closed_form(f);
    const BoundaryJet jet = recover_boundary_jet(oracle, vec({0.0}), vec({1.0}));
    CHECK(jet.at({1}).max_abs() <= 5e-5);
    const SymmetricForm& d2 = jet.at({2});
    CHECK(std::abs(d2(0, 0) + 1.0) <= 1e-3);
    CHECK(std::abs(d2(1, 1) - 1.0) <= 1e-3);
    // order-0 entry equals the pointwise recovery
    const auto r = recover_inverse_metric_at(oracle, SpacetimePoint::spatial(vec({0.0})));
    CHECK((jet.at({0}).matrix() - r.Q.matrix()).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("boundary jet in two dimensions with mixed derivatives") {
    const MetricField f = conformal_bump(2);
    const LengthOracle oracle = LengthOracle::closed_form(f);
    const BoundaryJet jet = recover_boundary_jet(oracle, vec({0.0, 0.0}), vec({1.0, 0.0}));
    // first derivatives vanish at the symmetric point
    CHECK(jet.at({1, 0}).max_abs() <= 5e-5);
    CHECK(jet.at({0, 1}).max_abs() <= 5e-5);
    // pure second derivatives: d2 c = -1 on the diagonal of the factor
    CHECK(std::abs(jet.at({2, 0})(0, 0) + 1.0) <= 1e-3);
    CHECK(std::abs(jet.at({0, 2})(0, 0) + 1.0) <= 1e-3);
    // mixed derivative vanishes
    CHECK(jet.at({1, 1}).max_abs() <= 1e-3);
}

TEST_CASE("boundary jet in three dimensions, off-center point") {
    // c = 1 + 0.5 exp(-|x|^2) at y = (0, 0.2, -0.1): derivatives of c are
    // dc/dxl = -2 xl (c - 1), d2c/dxl dxm = (4 xl xm - 2 delta_lm)(c - 1)
    const MetricField f = conformal_bump(3);
    const LengthOracle oracle = LengthOracle::closed_form(f);
    const Vector y = vec({0.0, 0.2, -0.1});
    const BoundaryJet jet = recover_boundary_jet(oracle, y, vec({1.0, 0.0, 0.0}));
    const double cm1 = 0.5 * std::exp(-(y[1] * y[1] + y[2] * y[2]));
    auto dc = [&](int l) { return -2.0 * y[l] * cm1; };
    auto d2c = [&](int l, int m) {
        return (4.0 * y[l] * y[m] - 2.0 * (l == m ? 1.0 : 0.0)) * cm1;
    };
    for (int l = 0; l < 3; ++l) {
        std::vector<int> alpha(3, 0);
        alpha[static_cast<size_t>(l)] = 1;
        CHECK(std::abs(jet.at(alpha)(0, 0) - dc(l)) <= 5e-5);
        CHECK(std::abs(jet.at(alpha)(1, 1) + dc(l)) <= 5e-5);
    }
    for (int l = 0; l < 3; ++l) {
        for (int m = l; m < 3; ++m) {
            std::vector<int> alpha(3, 0);
            alpha[static_cast<size_t>(l)] += 1;
            alpha[static_cast<size_t>(m)] += 1;
            CHECK(std::abs(jet.at(alpha)(0, 0) - d2c(l, m)) <= 1e-3);
        }
    }
}

TEST_CASE("richardson option tightens first derivatives") {
    const MetricField f = MetricField::conformal(Expr::parse("1+sin(x1)", 1), 1,
                                                 Box(std::vector<std::array<double, 2>>{{-0.5, 5.0}}));
    const LengthOracle oracle = LengthOracle::closed_form(f);
    BoundaryJetOptions plain, rich;
    plain.order = 1;
    rich.order = 1;
    rich.richardson = true;
    const double truth = 1.0;  // d c/dx1 at 0 = cos(0)
    const double e_plain =
        std::abs(recover_boundary_jet(oracle, vec({0.0}), vec({1.0}), plain).at({1})(0, 0) - truth);
    const double e_rich =
        std::abs(recover_boundary_jet(oracle, vec({0.0}), vec({1.0}), rich).at({1})(0, 0) - truth);
    CHECK(e_rich <= e_plain + 1e-12);
}

TEST_CASE("unsupported jet order") {
    const LengthOracle mink =
        LengthOracle::closed_form(MetricField::minkowski(1, Box::cube(1, -5, 5)));
    BoundaryJetOptions opts;
    opts.order = 3;
    CHECK_THROWS_AS(recover_boundary_jet(mink, vec({0.0}), vec({1.0}), opts), UnsupportedOrder);
}

TEST_CASE("riemannian recovery of constant and varying fields") {
    // a wide offset keeps the second-difference cancellation near roundoff
    RecoveryOptions wide;
    wide.epsilon = 0.1;

    // identity
    const RiemannianField eye = RiemannianField::general(
        {{{1, 1}, Expr::constant(1.0)}, {{2, 2}, Expr::constant(1.0)}}, 2, Box::cube(2, -5, 5));
    const SymmetricForm q_eye =
        recover_riemannian(RiemannianLengthOracle::closed_form(eye), vec({0.3, -0.4}), wide);
    CHECK((q_eye.matrix() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);

    // diag(4, 1)
    const RiemannianField diag = RiemannianField::general(
        {{{1, 1}, Expr::constant(4.0)}, {{2, 2}, Expr::constant(1.0)}}, 2, Box::cube(2, -5, 5));
    const SymmetricForm q_diag =
        recover_riemannian(RiemannianLengthOracle::closed_form(diag), vec({0.0, 0.0}), wide);
    CHECK(std::abs(q_diag(0, 0) - 4.0) <= 1e-12);
    CHECK(std::abs(q_diag(1, 1) - 1.0) <= 1e-12);
    CHECK(std::abs(q_diag(0, 1)) <= 1e-12);

    // constant off-diagonal
    const RiemannianField g = RiemannianField::general(
        {{{1, 1}, Expr::constant(2.0)}, {{1, 2}, Expr::constant(0.5)}, {{2, 2}, Expr::constant(1.0)}},
        2, Box::cube(2, -5, 5));
    const SymmetricForm q = recover_riemannian(RiemannianLengthOracle::closed_form(g),
                                               vec({1.0, 1.0}), wide);
    CHECK(std::abs(q(0, 0) - 2.0) <= 1e-12);
    CHECK(std::abs(q(0, 1) - 0.5) <= 1e-12);
    CHECK(std::abs(q(1, 1) - 1.0) <= 1e-12);

    // x-dependent, default options
    const RiemannianField vf = RiemannianField::general(
        {{{1, 1}, Expr::parse("1+0.5*exp(-x1^2-x2^2)", 2)}, {{2, 2}, Expr::parse("2+sin(x1)", 2)}},
        2, Box::cube(2, -5, 5));
    const Vector y = vec({0.2, -0.1});
    const SymmetricForm qv =
        recover_riemannian(RiemannianLengthOracle::closed_form(vf), y);
    const Matrix truth = vf.evaluate_inverse_metric(y).matrix();
    CHECK((qv.matrix() - truth).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("riemannian recovery fails loudly when queries keep rejecting") {
    // negative-definite data: even the seed direction rejects at every offset
    const RiemannianField bad = RiemannianField::general(
        {{{1, 1}, Expr::constant(-1.0)}, {{2, 2}, Expr::constant(-0.5)}}, 2, Box::cube(2, -5, 5));
    CHECK_THROWS_AS(
        recover_riemannian(RiemannianLengthOracle::closed_form(bad), vec({0.0, 0.0})),
        PolarizationFailure);
}

TEST_CASE("a shared oracle serves concurrent recoveries") {
    const MetricField f = conformal_bump(1);
    const LengthOracle oracle = LengthOracle::closed_form(f);
    std::vector<std::future<Matrix>> jobs;
    for (int k = 0; k < 6; ++k) {
        jobs.push_back(std::async(std::launch::async, [&, k] {
            const auto r = recover_inverse_metric_at(
                oracle, SpacetimePoint::spatial(vec({0.2 * k - 0.5})));
            return Matrix(r.Q.matrix());
        }));
    }
    for (int k = 0; k < 6; ++k) {
        const Matrix got = jobs[static_cast<size_t>(k)].get();
        const auto again =
            recover_inverse_metric_at(oracle, SpacetimePoint::spatial(vec({0.2 * k - 0.5})));
        CHECK((got - again.Q.matrix()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("polarization failure when the admissible cone closes") {
    // table with only the seed itself: every polarization node misses
    std::vector<LengthSample> rows;
    rows.push_back({SpacetimePoint::spatial(vec({0.0})), Covector(1.0, vec({0.0})), 1.0, 1.0});
    const LengthOracle table = LengthOracle::table(rows, 1);
    RecoveryOptions opts;
    opts.seed_direction = Covector(1.0, vec({0.0}));
    CHECK_THROWS_AS(recover_inverse_metric_at(table, SpacetimePoint::spatial(vec({0.0})), opts),
                    PolarizationFailure);
}

}  // TEST_SUITE
