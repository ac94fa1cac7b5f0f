#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pfw/cech.hpp"
#include "pfw/sampling.hpp"

using namespace pfw;

namespace {

ManifoldSpec unit_torus(const Rational& k = Rational(1)) {
    ManifoldSpec spec;
    spec.pairs = 1;
    spec.scale = k;
    spec.x_period = {Rational(1)};
    spec.p_period = {Rational(1)};
    spec.x0_period = 1.0;
    return spec;
}

ManifoldSpec open_space() {
    ManifoldSpec spec;
    spec.pairs = 1;
    spec.scale = Rational(1);
    spec.x_period = {std::nullopt};
    spec.p_period = {std::nullopt};
    spec.x0_period = std::nullopt;
    return spec;
}

}  // namespace

TEST_CASE("3x3 covering of the unit torus") {
    Covering cov = build_covering(unit_torus(), 3);
    CHECK(cov.charts.size() == 9);
    CHECK(cov.gridded_coords == std::vector<std::string>{"x1", "p1"});
    // with three boxes per circle every chart pair meets
    CHECK(cov.overlaps.size() == 36);
    // four triples around each of the nine grid corners
    CHECK(cov.triples.size() == 36);
    CHECK(covers_quotient(cov, 7));

    // chart boxes: side 1/3 plus a margin on each side
    const Chart& chart = cov.charts.front();
    int x1 = 1;  // coords are (x0, x1, p1)
    CHECK(chart.box[x1].width() == Rational(1, 3) + Rational(2) * Rational(1, 12));

    // transitions are lattice translations consistent on triples
    for (const auto& tri : cov.triples) {
        auto juv = cov.jump(tri.u, tri.v);
        auto jvw = cov.jump(tri.v, tri.w);
        auto juw = cov.jump(tri.u, tri.w);
        for (size_t c = 0; c < juv.size(); ++c) CHECK(juv[c] + jvw[c] == juw[c]);
    }
}

TEST_CASE("degenerate covers") {
    CHECK_THROWS_AS(build_covering(unit_torus(), 2), std::invalid_argument);

    Covering trivial = build_covering(open_space(), 3);
    CHECK(trivial.charts.size() == 1);
    CHECK(trivial.overlaps.empty());
    CHECK(trivial.triples.empty());
    CHECK(covers_quotient(trivial, 3));
}

TEST_CASE("local potentials") {
    Covering cov = build_covering(unit_torus(), 3);
    Frame fr = cov.chart_frame(0);
    VectorField xi = characteristic_field(fr);
    DifferentialForm omega = omega_form(cov.spec, fr);

    for (size_t c = 0; c < cov.charts.size(); ++c) {
        DifferentialForm beta = local_potential(cov, static_cast<int>(c));
        Frame cfr = cov.chart_frame(static_cast<int>(c));
        CHECK(exterior_derivative(beta) == omega_form(cov.spec, cfr));
        CHECK(is_basic(beta, characteristic_field(cfr)));
    }

    // chart one lattice copy up in p reads beta = (p + 1) dx
    Covering lifted = cov;
    lifted.charts[0].lift[fr.index_of("p1")] = 1;
    DifferentialForm beta_lift = local_potential(lifted, 0);
    DifferentialForm expected(fr, 1);
    expected.add_term({fr.index_of("x1")},
                      Polynomial::variable("p1") + Polynomial::constant(Rational(1)));
    CHECK(beta_lift == expected);
    CHECK(exterior_derivative(beta_lift) == omega);

    // scale k = 1/2 halves the potential
    Covering half = build_covering(unit_torus(Rational(1, 2)), 3);
    DifferentialForm beta_half = local_potential(half, 0);
    Frame hfr = half.chart_frame(0);
    DifferentialForm expected_half(hfr, 1);
    expected_half.add_term({hfr.index_of("x1")},
                           Rational(1, 2) * Polynomial::variable("p1"));
    CHECK(beta_half == expected_half);
}

TEST_CASE("primitive of a closed 1-form") {
    Frame fr{"U", {"x", "p"}};
    // gamma = d(x^2 p + p) = 2xp dx + (x^2 + 1) dp
    Polynomial f = Polynomial::variable("x") * Polynomial::variable("x") *
                       Polynomial::variable("p") +
                   Polynomial::variable("p");
    DifferentialForm gamma = exterior_derivative(DifferentialForm::function(fr, f));
    std::map<std::string, Rational> base{{"x", Rational(1, 2)}, {"p", Rational(-1)}};

    Polynomial F = primitive_of_closed(gamma, base);
    CHECK(F.evaluate_exact(base) == Rational(0));
    DifferentialForm dF = exterior_derivative(DifferentialForm::function(fr, F));
    CHECK(dF == gamma);

    // path-order independence: integrate p-axis first instead
    std::vector<int> reversed{1, 0};
    CHECK(primitive_of_closed(gamma, base, &reversed) == F);

    // a non-closed form has no primitive
    DifferentialForm bad(fr, 1);
    bad.add_term({fr.index_of("x")}, Polynomial::variable("p"));
    CHECK_THROWS_AS(primitive_of_closed(bad, base), std::invalid_argument);
}

TEST_CASE("transition potentials") {
    Covering cov = build_covering(unit_torus(), 3);
    auto beta = local_potentials(cov);

    int nonzero = 0;
    for (size_t i = 0; i < cov.overlaps.size(); ++i) {
        const Overlap& ov = cov.overlaps[i];
        Polynomial b = transition_potential(cov, beta, static_cast<int>(i));

        // d(beta_UV) = beta_U - beta_V, with beta_V read through the transition
        Frame fr = cov.chart_frame(ov.u);
        DifferentialForm db(fr, 1);
        for (int c = 0; c < fr.dimension(); ++c)
            db.add_term({c}, b.derivative_or_zero(fr.coords[c]));
        AffineChartMap to_u = AffineChartMap::translation(
            fr, cov.chart_frame(ov.v),
            [&] {
                std::map<std::string, Rational> shifts;
                for (size_t ci = 0; ci < fr.coords.size(); ++ci) {
                    auto L = cov.spec.lattice_period(fr.coords[ci]);
                    if (L && ov.jump[ci] != 0)
                        shifts[fr.coords[ci]] = Rational(-ov.jump[ci]) * *L;
                }
                return shifts;
            }());
        CHECK(db == beta[ov.u] - pullback(to_u, beta[ov.v]));

        // anchored normalization: vanishes at the lattice-rounded center
        CHECK(b.evaluate_exact(overlap_anchor(cov, static_cast<int>(i))) == Rational(0));
        if (!b.is_zero()) ++nonzero;
    }
    // exactly the p-wrapping pairs carry a potential
    CHECK(nonzero > 0);

    // corrupting one potential breaks closedness of the difference
    auto corrupted = beta;
    Frame f0 = cov.chart_frame(cov.overlaps[0].u);
    DifferentialForm junk(f0, 1);
    junk.add_term({f0.index_of("x1")},
                  Polynomial::variable("p1") * Polynomial::variable("p1"));
    corrupted[cov.overlaps[0].u] = junk;
    CHECK_THROWS_AS(transition_potential(cov, corrupted, 0), std::invalid_argument);
}

TEST_CASE("cocycle constants on the unit torus") {
    Covering cov = build_covering(unit_torus(), 3);
    CechData data = compute_cech(cov);

    // every beta_UV + beta_VU vanishes with the shared anchors
    for (const auto& c : data.pair_gauge_const) CHECK(c == Rational(0));

    // values are integers in {-1, 0, 1} with both signs present
    bool saw_plus = false, saw_minus = false;
    for (const auto& c : data.cocycle) {
        CHECK(c.is_integer());
        CHECK(c.abs() <= Rational(1));
        if (c == Rational(1)) saw_plus = true;
        if (c == Rational(-1)) saw_minus = true;
    }
    CHECK(saw_plus);
    CHECK(saw_minus);

    // total antisymmetry under argument permutations
    const TripleOverlap& tri = cov.triples.front();
    Rational c0 = cocycle_signed(cov, data, tri.u, tri.v, tri.w);
    CHECK(cocycle_signed(cov, data, tri.v, tri.u, tri.w) == -c0);
    CHECK(cocycle_signed(cov, data, tri.v, tri.w, tri.u) == c0);
    CHECK(cocycle_signed(cov, data, tri.w, tri.v, tri.u) == -c0);

    CHECK(integrality_check(cov, data).integral);

    // fundamental total = k = 1, matching the numeric omega integral
    std::vector<Rational> totals = fundamental_totals(cov, data);
    REQUIRE(totals.size() == 1);
    CHECK(totals[0] == Rational(1));
    CHECK(std::abs(totals[0].to_double() - omega_face_integral(cov.spec, 1, 32)) < 1e-9);
}

TEST_CASE("scaled cocycles") {
    // k = 2: integral, total 2
    Covering cov2 = build_covering(unit_torus(Rational(2)), 3);
    CechData data2 = compute_cech(cov2);
    CHECK(integrality_check(cov2, data2).integral);
    CHECK(fundamental_totals(cov2, data2)[0] == Rational(2));

    // k = 1/2: fails integrality with c = +-1/2 reported
    Covering covh = build_covering(unit_torus(Rational(1, 2)), 3);
    CechData datah = compute_cech(covh);
    IntegralityReport rep = integrality_check(covh, datah);
    CHECK_FALSE(rep.integral);
    REQUIRE_FALSE(rep.offending_triples.empty());
    for (int t : rep.offending_triples)
        CHECK(datah.cocycle[t].abs() == Rational(1, 2));
    CHECK_FALSE(rep.caveat.empty());
    CHECK(fundamental_totals(covh, datah)[0] == Rational(1, 2));

    // single-chart space: no triples, vacuously integral
    Covering trivial = build_covering(open_space(), 3);
    CechData trivial_data = compute_cech(trivial);
    CHECK(trivial_data.cocycle.empty());
    CHECK(integrality_check(trivial, trivial_data).integral);
}

TEST_CASE("a non-constant cocycle sum is rejected loudly") {
    Covering cov = build_covering(unit_torus(), 3);
    CechData data = compute_cech(cov);
    // tamper with one transition potential so the triple sums stop telescoping
    data.beta_uv[0] = data.beta_uv[0] + Polynomial::variable("p1");
    bool hit = false;
    // the damaged overlap participates in some triple; scan for it
    for (size_t t = 0; t < cov.triples.size() && !hit; ++t) {
        try {
            cocycle_constant(cov, data, static_cast<int>(t));
        } catch (const std::logic_error&) {
            hit = true;
        }
    }
    CHECK(hit);
}

TEST_CASE("gauge shifts leave the cocycle unchanged") {
    Covering cov = build_covering(unit_torus(), 3);
    CechData data = compute_cech(cov);
    SplitMix64 rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        Polynomial f = random_polynomial({"x1", "p1"}, 3, 4, rng);
        CechData shifted = apply_gauge(cov, data, f);
        CHECK(shifted.cocycle == data.cocycle);
        // the shifted potentials still satisfy their contracts
        for (size_t c = 0; c < cov.charts.size(); ++c) {
            Frame fr = cov.chart_frame(static_cast<int>(c));
            CHECK(exterior_derivative(shifted.beta[c]) == omega_form(cov.spec, fr));
            CHECK(is_basic(shifted.beta[c], characteristic_field(fr)));
        }
    }
    // a gauge touching x0 is not basic
    CHECK_THROWS_AS(apply_gauge(cov, data, Polynomial::variable("x0")),
                    std::invalid_argument);
}

TEST_CASE("two-pair base") {
    ManifoldSpec spec;
    spec.pairs = 2;
    spec.scale = Rational(1);
    spec.x_period = {Rational(1), Rational(1)};
    spec.p_period = {Rational(1), Rational(1)};
    spec.x0_period = std::nullopt;

    Covering cov = build_covering(spec, 3);
    CHECK(cov.charts.size() == 81);
    CechData data = compute_cech(cov);
    CHECK(integrality_check(cov, data).integral);
    std::vector<Rational> totals = fundamental_totals(cov, data);
    REQUIRE(totals.size() == 2);
    CHECK(totals[0] == Rational(1));
    CHECK(totals[1] == Rational(1));
}
