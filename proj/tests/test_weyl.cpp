#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pfw/weyl.hpp"

using namespace pfw;

namespace {

ManifoldSpec unit_torus(const Rational& k = Rational(1), int pairs = 1) {
    ManifoldSpec spec;
    spec.pairs = pairs;
    spec.scale = k;
    spec.x_period.assign(pairs, Rational(1));
    spec.p_period.assign(pairs, Rational(1));
    spec.x0_period = 1.0;
    return spec;
}

WeylBundle unit_bundle(const Rational& k = Rational(1)) {
    Covering cov = build_covering(unit_torus(k), 3);
    CechData data = compute_cech(cov);
    return build_bundle(std::move(cov), std::move(data));
}

std::map<std::string, double> sample_point(const Frame& fr, SplitMix64& rng) {
    std::map<std::string, double> pt;
    for (const auto& c : fr.coords) pt[c] = rng.uniform() * 2.0 - 1.0;
    return pt;
}

}  // namespace

TEST_CASE("bundle construction and refusal") {
    WeylBundle bundle = unit_bundle();
    CHECK(bundle.cover.charts.size() == 9);

    Covering covh = build_covering(unit_torus(Rational(1, 2)), 3);
    CechData datah = compute_cech(covh);
    CHECK_THROWS_AS(build_bundle(covh, datah), IntegralityError);
    try {
        build_bundle(covh, datah);
    } catch (const IntegralityError& e) {
        CHECK_FALSE(e.offending_triples.empty());
    }

    // trivial base gives the product bundle: no transitions at all
    ManifoldSpec flat;
    flat.pairs = 1;
    flat.scale = Rational(1);
    flat.x_period = {std::nullopt};
    flat.p_period = {std::nullopt};
    Covering trivial_cov = build_covering(flat, 3);
    WeylBundle product = build_bundle(trivial_cov, compute_cech(trivial_cov));
    CHECK(product.cover.overlaps.empty());
}

TEST_CASE("canonical objects in the fiber chart") {
    ManifoldSpec spec = unit_torus();
    CanonicalObjects o = canonical_objects(spec, "U", Polynomial());
    const Frame& fr = o.frame;
    REQUIRE(fr.coords == std::vector<std::string>{"s", "x0", "x1", "p1"});

    Polynomial p = Polynomial::variable("p1");
    DifferentialForm ds = DifferentialForm::coordinate_differential(fr, "s");
    DifferentialForm dx0 = DifferentialForm::coordinate_differential(fr, "x0");
    DifferentialForm dx1 = DifferentialForm::coordinate_differential(fr, "x1");
    DifferentialForm dp1 = DifferentialForm::coordinate_differential(fr, "p1");

    CHECK(o.beta == ds + p * dx1);
    CHECK(o.theta == dx0 - ds);
    CHECK(o.omega == wedge(dp1, dx1));
    CHECK(o.E == VectorField::coordinate(fr, "s"));
    CHECK(o.X == VectorField::coordinate(fr, "x0"));
    CHECK(o.A.size() == 1);
    CHECK(o.A[0].is_zero());
    CHECK(o.B[0] == p);

    // gauge f realizes A = df/dp, B = k p + df/dx
    Polynomial f = Polynomial::variable("x1") * Polynomial::variable("p1");
    CanonicalObjects og = canonical_objects(spec, "U", f);
    CHECK(og.A[0] == Polynomial::variable("x1"));
    CHECK(og.B[0] == p + p);  // k p + df/dx = p + p
    CHECK(exterior_derivative(og.beta_u) == og.omega);
    CHECK(og.theta == o.theta - exterior_derivative(DifferentialForm::function(fr, f)));

    CHECK_THROWS_AS(canonical_objects(spec, "U", Polynomial::variable("x0")),
                    std::invalid_argument);
}

TEST_CASE("identity suite passes exactly for n = 1, 2, 3") {
    SplitMix64 rng(71);
    for (int n = 1; n <= 3; ++n) {
        ManifoldSpec spec = unit_torus(Rational(1), n);
        std::vector<std::string> basic;
        for (int i = 1; i <= n; ++i) {
            basic.push_back(spec.x_name(i));
            basic.push_back(spec.p_name(i));
        }
        IdentityReport rep =
            run_identity_suite(canonical_objects(spec, "U", Polynomial()));
        CHECK(rep.all_pass);
        CHECK(rep.rows.size() >= 36);

        for (int trial = 0; trial < 3; ++trial) {
            Polynomial f = random_polynomial(basic, 3, 4, rng);
            IdentityReport shifted =
                run_identity_suite(canonical_objects(spec, "U", f));
            CHECK(shifted.all_pass);
        }
    }
}

TEST_CASE("sign-sensitive rows carry their annotation") {
    IdentityReport rep =
        run_identity_suite(canonical_objects(unit_torus(), "U", Polynomial()));
    bool found_iy = false, found_domega = false;
    for (const auto& row : rep.rows) {
        if (row.name == "iY_Omega") {
            found_iy = true;
            CHECK(row.pass);
            CHECK_FALSE(row.note.empty());
        }
        if (row.name == "d_Omega") {
            found_domega = true;
            CHECK(row.pass);
            CHECK_FALSE(row.note.empty());
        }
    }
    CHECK(found_iy);
    CHECK(found_domega);
}

TEST_CASE("top power of the pre-symplectic form is a nonzero constant") {
    for (int n = 1; n <= 2; ++n) {
        CanonicalObjects o =
            canonical_objects(unit_torus(Rational(1), n), "U", Polynomial());
        DifferentialForm power = o.big_omega;
        for (int j = 0; j < n; ++j) power = wedge(power, o.big_omega);
        REQUIRE(power.components().size() == 1);
        CHECK(power.components().begin()->second.is_constant());
        CHECK_FALSE(power.components().begin()->second.constant_value().is_zero());
    }
}

TEST_CASE("sharp operator") {
    ManifoldSpec spec = unit_torus();
    CanonicalObjects o = canonical_objects(spec, "U", Polynomial());
    SplitMix64 rng(73);

    // sharp(beta) = X, sharp(alpha) = -E, sharp(theta) = -Y, numerically
    for (int t = 0; t < 10; ++t) {
        auto pt = sample_point(o.frame, rng);
        Eigen::VectorXd vb = sharp(o, o.beta, pt);
        Eigen::VectorXd va = sharp(o, o.alpha, pt);
        Eigen::VectorXd vt = sharp(o, o.theta, pt);
        Eigen::VectorXd X = Eigen::VectorXd::Zero(4);
        X(1) = 1.0;  // (s, x0, x1, p1)
        Eigen::VectorXd E = Eigen::VectorXd::Zero(4);
        E(0) = 1.0;
        CHECK((vb - X).norm() < 1e-12);
        CHECK((va + E).norm() < 1e-12);
        CHECK((vt + (X + E)).norm() < 1e-12);
    }

    // exact route: sharp(beta) = X on the nose at rational points
    std::map<std::string, Rational> qpt{{"s", Rational(1, 3)},
                                        {"x0", Rational(-2, 5)},
                                        {"x1", Rational(1, 7)},
                                        {"p1", Rational(3, 4)}};
    std::vector<Rational> exact = sharp_exact(o.big_omega, o.beta, qpt);
    CHECK(exact == std::vector<Rational>{Rational(0), Rational(1), Rational(0),
                                         Rational(0)});
    std::vector<Rational> exact_alpha = sharp_exact(o.big_omega, o.alpha, qpt);
    CHECK(exact_alpha == std::vector<Rational>{Rational(-1), Rational(0), Rational(0),
                                               Rational(0)});

    // inverse property on random polynomial 1-forms
    for (int t = 0; t < 20; ++t) {
        DifferentialForm gamma(o.frame, 1);
        for (int c = 0; c < 4; ++c)
            gamma.add_term({c}, random_polynomial(o.frame.coords, 2, 3, rng));
        auto pt = sample_point(o.frame, rng);
        Eigen::VectorXd v = sharp(o, gamma, pt);
        // contract v back into Omega at the point
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(4, 4);
        for (const auto& [k, poly] : o.big_omega.components()) {
            double val = poly.evaluate(pt);
            M(k[0], k[1]) += val;
            M(k[1], k[0]) -= val;
        }
        Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
        for (const auto& [k, poly] : gamma.components()) g(k[0]) = poly.evaluate(pt);
        CHECK((M.transpose() * v - g).lpNorm<Eigen::Infinity>() < 1e-10);
    }

    // omega alone is degenerate with kernel spanned by E and X
    try {
        sharp(o.omega, o.beta, sample_point(o.frame, rng));
        CHECK(false);
    } catch (const SharpSingularError& e) {
        CHECK(e.kernel_dimension == 2);
    }
    CHECK_THROWS_AS(sharp_exact(o.omega, o.beta, qpt), SharpSingularError);
}

TEST_CASE("numeric cocycle audit") {
    SplitMix64 rng(79);
    WeylBundle bundle = unit_bundle();
    CHECK(verify_cocycle_numeric(bundle.cover, bundle.cech, 100, rng) < 1e-12);

    // trivial bundle: nothing to check, zero residual
    ManifoldSpec flat;
    flat.pairs = 1;
    flat.scale = Rational(1);
    flat.x_period = {std::nullopt};
    flat.p_period = {std::nullopt};
    Covering trivial_cov = build_covering(flat, 3);
    CechData trivial_data = compute_cech(trivial_cov);
    CHECK(verify_cocycle_numeric(trivial_cov, trivial_data, 50, rng) == 0.0);

    // half-integral data, gate bypassed: the triple product falls on -1
    Covering covh = build_covering(unit_torus(Rational(1, 2)), 3);
    CechData datah = compute_cech(covh);
    WeylBundle forced = build_bundle_unchecked(covh, datah);
    double residual = verify_cocycle_numeric(forced.cover, forced.cech, 400, rng);
    CHECK(residual == doctest::Approx(2.0).epsilon(1e-9));
}
