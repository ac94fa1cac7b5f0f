#include "pfw/weyl.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace pfw {

WeylBundle build_bundle(Covering cover, CechData cech) {
    IntegralityReport rep = integrality_check(cover, cech);
    if (!rep.integral) {
        std::ostringstream os;
        os << "integrality condition violated on " << rep.offending_triples.size()
           << " triple overlap(s); first offending c = ";
        os << cech.cocycle[rep.offending_triples.front()].str();
        throw IntegralityError(os.str(), rep.offending_triples);
    }
    return WeylBundle{std::move(cover), std::move(cech)};
}

WeylBundle build_bundle_unchecked(Covering cover, CechData cech) {
    return WeylBundle{std::move(cover), std::move(cech)};
}

Frame total_space_frame(const ManifoldSpec& spec, const std::string& chart_id) {
    std::vector<std::string> coords;
    coords.reserve(spec.dimension() + 1);
    coords.push_back("s");
    for (const auto& c : spec.coords()) coords.push_back(c);
    return Frame{chart_id, std::move(coords)};
}

CanonicalObjects canonical_objects(const ManifoldSpec& spec, const std::string& chart_id,
                                   const Polynomial& gauge) {
    for (const auto& v : gauge.variables()) {
        if (v == "x0" || v == "s")
            throw std::invalid_argument("gauge function must be basic (x^i, p_i only)");
    }
    Frame fr = total_space_frame(spec, chart_id);

    CanonicalObjects o{spec,
                       fr,
                       gauge,
                       alpha_form(spec, fr),
                       DifferentialForm(fr, 1),
                       DifferentialForm(fr, 1),
                       omega_form(spec, fr),
                       DifferentialForm(fr, 1),
                       DifferentialForm(fr, 2),
                       VectorField::coordinate(fr, "s"),
                       VectorField::coordinate(fr, "x0"),
                       VectorField(fr),
                       {},
                       {}};

    DifferentialForm beta_u(fr, 1);
    for (int i = 1; i <= spec.pairs; ++i) {
        beta_u.add_term({fr.index_of(spec.x_name(i))},
                        spec.scale * Polynomial::variable(spec.p_name(i)));
    }
    beta_u = beta_u + exterior_derivative(DifferentialForm::function(fr, gauge));
    o.beta_u = beta_u;
    o.beta = DifferentialForm::coordinate_differential(fr, "s") + beta_u;
    o.theta = o.alpha - o.beta;
    o.big_omega = wedge(o.alpha, o.beta) + o.omega;
    o.Y = o.X + o.E;
    for (int i = 1; i <= spec.pairs; ++i) {
        o.A.push_back(beta_u.component({fr.index_of(spec.p_name(i))}));
        o.B.push_back(beta_u.component({fr.index_of(spec.x_name(i))}));
    }
    return o;
}

CanonicalObjects canonical_objects(const WeylBundle& bundle, int chart,
                                   const Polynomial& gauge) {
    if (chart < 0 || chart >= static_cast<int>(bundle.cover.charts.size()))
        throw std::invalid_argument("chart does not belong to the bundle's covering");
    return canonical_objects(bundle.cover.spec, bundle.cover.charts[chart].id, gauge);
}

namespace {

DifferentialForm scalar_one(const Frame& fr) {
    return DifferentialForm::function(fr, Polynomial::constant(Rational(1)));
}

IdentityRow row_equal(const std::string& name, const std::string& statement,
                      const DifferentialForm& computed, const DifferentialForm& expected,
                      const std::string& note = "") {
    return IdentityRow{name, statement, computed == expected, note};
}

IdentityRow row_zero_field(const std::string& name, const std::string& statement,
                           const VectorField& computed) {
    return IdentityRow{name, statement, computed.is_zero(), ""};
}

}  // namespace

IdentityReport run_identity_suite(const CanonicalObjects& o) {
    const Frame& fr = o.frame;
    DifferentialForm zero0(fr, 0);
    DifferentialForm zero1(fr, 1);
    DifferentialForm zero2(fr, 2);
    DifferentialForm zero3(fr, 3);
    DifferentialForm one = scalar_one(fr);

    const std::string sign_note =
        "sign follows from theta = alpha - beta with Omega = alpha ^ beta + omega; "
        "the opposite sign sometimes quoted for this row is inconsistent with the "
        "E and X contraction rows";

    IdentityReport rep;
    auto add = [&rep](IdentityRow row) { rep.rows.push_back(std::move(row)); };

    // structure equations
    add(row_equal("d_alpha", "d(alpha) = omega", exterior_derivative(o.alpha), o.omega));
    add(row_equal("d_beta", "d(beta) = omega", exterior_derivative(o.beta), o.omega));
    add(row_equal("d_beta_u", "d(beta_u) = omega", exterior_derivative(o.beta_u), o.omega));
    add(row_equal("d_theta", "d(theta) = 0", exterior_derivative(o.theta), zero2));
    add(row_equal("d_Omega", "d(Omega) = -theta ^ omega", exterior_derivative(o.big_omega),
                  -wedge(o.theta, o.omega), sign_note));

    // properties of E
    add(row_equal("iE_alpha", "i_E alpha = 0", interior_product(o.E, o.alpha), zero0));
    add(row_equal("LE_alpha", "L_E alpha = 0", lie_derivative(o.E, o.alpha), zero1));
    add(row_equal("iE_beta", "i_E beta = 1", interior_product(o.E, o.beta), one));
    add(row_equal("LE_beta", "L_E beta = 0", lie_derivative(o.E, o.beta), zero1));
    add(row_equal("iE_theta", "i_E theta = -1", interior_product(o.E, o.theta), -one));
    add(row_equal("LE_theta", "L_E theta = 0", lie_derivative(o.E, o.theta), zero1));
    add(row_equal("iE_omega", "i_E omega = 0", interior_product(o.E, o.omega), zero1));
    add(row_equal("LE_omega", "L_E omega = 0", lie_derivative(o.E, o.omega), zero2));
    add(row_equal("iE_Omega", "i_E Omega = -alpha", interior_product(o.E, o.big_omega),
                  -o.alpha));
    add(row_equal("LE_Omega", "L_E Omega = 0", lie_derivative(o.E, o.big_omega), zero2));
    add(row_zero_field("bracket_EX", "[E, X] = 0", lie_bracket(o.E, o.X)));

    // properties of X
    add(row_equal("iX_alpha", "i_X alpha = 1", interior_product(o.X, o.alpha), one));
    add(row_equal("LX_alpha", "L_X alpha = 0", lie_derivative(o.X, o.alpha), zero1));
    add(row_equal("iX_beta", "i_X beta = 0", interior_product(o.X, o.beta), zero0));
    add(row_equal("LX_beta", "L_X beta = 0", lie_derivative(o.X, o.beta), zero1));
    add(row_equal("iX_omega", "i_X omega = 0", interior_product(o.X, o.omega), zero1));
    add(row_equal("LX_omega", "L_X omega = 0", lie_derivative(o.X, o.omega), zero2));
    add(row_equal("iX_theta", "i_X theta = 1", interior_product(o.X, o.theta), one));
    add(row_equal("LX_theta", "L_X theta = 0", lie_derivative(o.X, o.theta), zero1));
    add(row_equal("iX_Omega", "i_X Omega = beta", interior_product(o.X, o.big_omega),
                  o.beta));
    add(row_equal("LX_Omega", "L_X Omega = 0", lie_derivative(o.X, o.big_omega), zero2));

    // properties of Y = X + E
    add(row_equal("iY_alpha", "i_Y alpha = 1", interior_product(o.Y, o.alpha), one));
    add(row_equal("LY_alpha", "L_Y alpha = 0", lie_derivative(o.Y, o.alpha), zero1));
    add(row_equal("iY_beta", "i_Y beta = 1", interior_product(o.Y, o.beta), one));
    add(row_equal("LY_beta", "L_Y beta = 0", lie_derivative(o.Y, o.beta), zero1));
    add(row_equal("iY_omega", "i_Y omega = 0", interior_product(o.Y, o.omega), zero1));
    add(row_equal("LY_omega", "L_Y omega = 0", lie_derivative(o.Y, o.omega), zero2));
    add(row_equal("iY_theta", "i_Y theta = 0", interior_product(o.Y, o.theta), zero0));
    add(row_equal("LY_theta", "L_Y theta = 0", lie_derivative(o.Y, o.theta), zero1));
    add(row_equal("iY_Omega", "i_Y Omega = -theta", interior_product(o.Y, o.big_omega),
                  -o.theta, sign_note));
    add(row_equal("LY_Omega", "L_Y Omega = 0", lie_derivative(o.Y, o.big_omega), zero2));

    // d(Omega) against the contraction route as a cross-check: the suite must
    // be internally consistent whatever the quoted sign is
    add(row_equal("dOmega_vs_theta", "d(Omega) + theta ^ omega = 0",
                  exterior_derivative(o.big_omega) + wedge(o.theta, o.omega), zero3));

    // nondegeneracy: the top wedge power is a nonzero constant multiple of the
    // coordinate volume form
    {
        DifferentialForm power = o.big_omega;
        for (int j = 1; j <= o.spec.pairs; ++j) power = wedge(power, o.big_omega);
        bool ok = power.components().size() == 1 &&
                  power.components().begin()->second.is_constant() &&
                  !power.components().begin()->second.constant_value().is_zero();
        std::string note;
        if (ok) {
            note = "top coefficient " +
                   power.components().begin()->second.constant_value().str();
        }
        rep.rows.push_back(
            IdentityRow{"Omega_nondegenerate",
                        "Omega^(n+1) = c * vol with constant c != 0", ok, note});
    }

    for (const auto& r : rep.rows) rep.all_pass = rep.all_pass && r.pass;
    return rep;
}

namespace {

Eigen::MatrixXd two_form_matrix(const DifferentialForm& two_form,
                                const std::map<std::string, double>& point) {
    if (two_form.degree() != 2)
        throw std::invalid_argument("sharp expects a 2-form");
    int dim = two_form.frame().dimension();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& [k, p] : two_form.components()) {
        double v = p.evaluate(point);
        M(k[0], k[1]) += v;
        M(k[1], k[0]) -= v;
    }
    return M;
}

Eigen::VectorXd one_form_vector(const DifferentialForm& gamma,
                                const std::map<std::string, double>& point) {
    if (gamma.degree() != 1)
        throw std::invalid_argument("sharp expects a 1-form argument");
    int dim = gamma.frame().dimension();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    for (const auto& [k, p] : gamma.components()) g(k[0]) = p.evaluate(point);
    return g;
}

}  // namespace

Eigen::VectorXd sharp(const DifferentialForm& two_form, const DifferentialForm& gamma,
                      const std::map<std::string, double>& point) {
    if (!(two_form.frame() == gamma.frame()))
        throw std::invalid_argument("sharp: forms on different charts");
    Eigen::MatrixXd M = two_form_matrix(two_form, point);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
        int kernel = static_cast<int>(M.rows() - lu.rank());
        throw SharpSingularError("2-form is degenerate at the sample point", kernel);
    }
    // (v . Omega) = gamma reads M^T v = gamma; antisymmetry gives v = M^{-1}(-gamma)
    return lu.solve(-one_form_vector(gamma, point));
}

Eigen::VectorXd sharp(const CanonicalObjects& objs, const DifferentialForm& gamma,
                      const std::map<std::string, double>& point) {
    return sharp(objs.big_omega, gamma, point);
}

std::vector<Rational> sharp_exact(const DifferentialForm& two_form,
                                  const DifferentialForm& gamma,
                                  const std::map<std::string, Rational>& point) {
    if (!(two_form.frame() == gamma.frame()))
        throw std::invalid_argument("sharp: forms on different charts");
    int dim = two_form.frame().dimension();
    std::vector<std::vector<Rational>> M(dim, std::vector<Rational>(dim, Rational(0)));
    for (const auto& [k, p] : two_form.components()) {
        Rational v = p.evaluate_exact(point);
        M[k[0]][k[1]] += v;
        M[k[1]][k[0]] -= v;
    }
    std::vector<Rational> rhs(dim, Rational(0));
    for (const auto& [k, p] : gamma.components()) rhs[k[0]] = -p.evaluate_exact(point);

    // Gaussian elimination with exact pivoting; M^T v = gamma as above
    std::vector<int> perm(dim);
    for (int i = 0; i < dim; ++i) perm[i] = i;
    int rank = 0;
    for (int col = 0; col < dim; ++col) {
        int pivot = -1;
        for (int r = rank; r < dim; ++r) {
            if (!M[r][col].is_zero()) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        std::swap(M[rank], M[pivot]);
        std::swap(rhs[rank], rhs[pivot]);
        for (int r = 0; r < dim; ++r) {
            if (r == rank || M[r][col].is_zero()) continue;
            Rational factor = M[r][col] / M[rank][col];
            for (int c2 = 0; c2 < dim; ++c2) M[r][c2] -= factor * M[rank][c2];
            rhs[r] -= factor * rhs[rank];
        }
        ++rank;
    }
    if (rank < dim)
        throw SharpSingularError("2-form is degenerate at the sample point", dim - rank);

    std::vector<Rational> v(dim, Rational(0));
    for (int r = 0; r < dim; ++r) {
        int lead = -1;
        for (int c2 = 0; c2 < dim; ++c2) {
            if (!M[r][c2].is_zero()) {
                lead = c2;
                break;
            }
        }
        v[lead] = rhs[r] / M[r][lead];
    }
    return v;
}

double verify_cocycle_numeric(const Covering& cover, const CechData& cech, int samples,
                              SplitMix64& rng) {
    if (cover.triples.empty()) return 0.0;
    const auto coords = cover.spec.coords();
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        int t = static_cast<int>(
            rng.uniform_int(0, static_cast<long long>(cover.triples.size()) - 1));
        const TripleOverlap& tri = cover.triples[t];

        // random point of the triple box, in U's lift
        std::map<std::string, double> pt_u;
        for (size_t ci = 0; ci < coords.size(); ++ci) {
            double lo = tri.box[ci].lo.to_double();
            double hi = tri.box[ci].hi.to_double();
            pt_u[coords[ci]] = lo + (hi - lo) * rng.uniform();
        }
        // same point in each chart's own lift
        auto shifted = [&](int chart) {
            std::vector<long long> j = cover.jump(chart, tri.u);  // z_chart = z_u + j L
            std::map<std::string, double> pt = pt_u;
            for (size_t ci = 0; ci < coords.size(); ++ci) {
                if (j[ci] == 0) continue;
                pt[coords[ci]] += static_cast<double>(j[ci]) *
                                  cover.spec.lattice_period(coords[ci])->to_double();
            }
            return pt;
        };

        auto eval_beta = [&](int a, int b) {
            Polynomial f = beta_uv_in_chart(cover, cech, a, a, b);
            return f.evaluate(shifted(a));
        };
        double phase = 2.0 * std::numbers::pi *
                       (eval_beta(tri.u, tri.v) + eval_beta(tri.v, tri.w) +
                        eval_beta(tri.w, tri.u));
        double res = std::hypot(std::cos(phase) - 1.0, std::sin(phase));
        worst = std::max(worst, res);
    }
    return worst;
}

}  // namespace pfw
