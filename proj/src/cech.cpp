#include "pfw/cech.hpp"

#include <algorithm>
#include <stdexcept>

namespace pfw {

namespace {

/// Transition map reading a form on chart `from` into the coordinates of
/// chart `to`: substitutes z_from = z_to - J*L with z_to = z_from + J*L.
AffineChartMap transition_map(const Covering& cov, int to, int from) {
    const auto coords = cov.spec.coords();
    std::vector<long long> j = cov.jump(to, from);
    std::map<std::string, Rational> shifts;
    for (size_t ci = 0; ci < coords.size(); ++ci) {
        if (j[ci] == 0) continue;
        auto period = cov.spec.lattice_period(coords[ci]);
        if (!period) throw std::logic_error("lattice jump on a non-periodic coordinate");
        shifts[coords[ci]] = Rational(-j[ci]) * *period;
    }
    return AffineChartMap::translation(cov.chart_frame(to), cov.chart_frame(from), shifts);
}

}  // namespace

DifferentialForm omega_form(const ManifoldSpec& spec, const Frame& frame) {
    DifferentialForm w(frame, 2);
    for (int i = 1; i <= spec.pairs; ++i) {
        w.add_term({frame.index_of(spec.p_name(i)), frame.index_of(spec.x_name(i))},
                   Polynomial::constant(spec.scale));
    }
    return w;
}

DifferentialForm alpha_form(const ManifoldSpec& spec, const Frame& frame) {
    DifferentialForm a(frame, 1);
    a.add_term({frame.index_of("x0")}, Polynomial::constant(Rational(1)));
    for (int i = 1; i <= spec.pairs; ++i) {
        a.add_term({frame.index_of(spec.x_name(i))},
                   spec.scale * Polynomial::variable(spec.p_name(i)));
    }
    return a;
}

VectorField characteristic_field(const Frame& frame) {
    return VectorField::coordinate(frame, "x0");
}

DifferentialForm local_potential(const Covering& cov, int chart) {
    const ManifoldSpec& spec = cov.spec;
    Frame frame = cov.chart_frame(chart);
    const auto coords = spec.coords();
    DifferentialForm beta(frame, 1);
    for (int i = 1; i <= spec.pairs; ++i) {
        Polynomial p = Polynomial::variable(spec.p_name(i));
        int pci = frame.index_of(spec.p_name(i));
        long long lift = cov.charts[chart].lift[pci];
        if (lift != 0) {
            auto period = spec.lattice_period(spec.p_name(i));
            if (!period) throw std::logic_error("lift on a non-periodic coordinate");
            p += Polynomial::constant(Rational(lift) * *period);
        }
        beta.add_term({frame.index_of(spec.x_name(i))}, spec.scale * p);
    }
    return beta;
}

std::vector<DifferentialForm> local_potentials(const Covering& cov) {
    std::vector<DifferentialForm> out;
    out.reserve(cov.charts.size());
    for (size_t c = 0; c < cov.charts.size(); ++c)
        out.push_back(local_potential(cov, static_cast<int>(c)));
    return out;
}

Polynomial primitive_of_closed(const DifferentialForm& one_form,
                               const std::map<std::string, Rational>& base,
                               const std::vector<int>* axis_order) {
    if (one_form.degree() != 1)
        throw std::invalid_argument("primitive expects a 1-form");
    if (!exterior_derivative(one_form).is_zero())
        throw std::invalid_argument("1-form is not closed; no primitive exists");

    const Frame& fr = one_form.frame();
    std::vector<int> order;
    if (axis_order) {
        order = *axis_order;
    } else {
        order.resize(fr.dimension());
        for (int i = 0; i < fr.dimension(); ++i) order[i] = i;
    }
    if (static_cast<int>(order.size()) != fr.dimension())
        throw std::invalid_argument("axis order must list every coordinate once");

    for (const auto& c : fr.coords) {
        if (base.find(c) == base.end())
            throw std::invalid_argument("base point missing coordinate '" + c + "'");
    }

    // F(z) = sum_t  int_{b_t}^{z_t} gamma_t(z_1..z_{t-1}, u, b_{t+1}..b_m) du
    // walking the axes in the given order; later axes stay pinned at the base.
    Polynomial total;
    for (size_t t = 0; t < order.size(); ++t) {
        const std::string& var = fr.coords[order[t]];
        Polynomial comp = one_form.component({order[t]});
        if (comp.is_zero()) continue;
        AffineSubstitution pin;
        for (const auto& v : comp.variables()) pin[v] = AffineExpr::var(v);
        for (size_t u = t + 1; u < order.size(); ++u) {
            const std::string& later = fr.coords[order[u]];
            pin[later] = AffineExpr::constant_expr(base.at(later));
        }
        Polynomial pinned = comp.substitute(pin);
        Polynomial anti = pinned.antiderivative(var);
        AffineSubstitution at_base;
        for (const auto& v : anti.variables()) at_base[v] = AffineExpr::var(v);
        at_base[var] = AffineExpr::constant_expr(base.at(var));
        total += anti - anti.substitute(at_base);
    }

    // exactness audit: d(total) must reproduce the input
    DifferentialForm check(fr, 1);
    for (int c = 0; c < fr.dimension(); ++c)
        check.add_term({c}, total.derivative_or_zero(fr.coords[c]));
    if (!(check == one_form))
        throw std::logic_error("primitive reconstruction failed");
    return total;
}

std::map<std::string, Rational> overlap_anchor(const Covering& cov, int overlap_idx) {
    const Overlap& ov = cov.overlaps[overlap_idx];
    const auto coords = cov.spec.coords();
    std::map<std::string, Rational> anchor;
    for (size_t ci = 0; ci < coords.size(); ++ci) {
        Rational center = ov.box[ci].center();
        auto period = cov.spec.lattice_period(coords[ci]);
        if (period) {
            anchor[coords[ci]] = Rational((center / *period).round_nearest()) * *period;
        } else {
            anchor[coords[ci]] = center;
        }
    }
    return anchor;
}

Polynomial transition_potential(const Covering& cov,
                                const std::vector<DifferentialForm>& beta,
                                int overlap_idx) {
    const Overlap& ov = cov.overlaps[overlap_idx];
    AffineChartMap into_u = transition_map(cov, ov.u, ov.v);
    DifferentialForm delta = beta[ov.u] - pullback(into_u, beta[ov.v]);
    if (!exterior_derivative(delta).is_zero())
        throw std::invalid_argument(
            "beta_U - beta_V is not closed on overlap; inconsistent potentials");
    return primitive_of_closed(delta, overlap_anchor(cov, overlap_idx));
}

Polynomial beta_uv_in_chart(const Covering& cov, const CechData& data, int target_chart,
                            int a, int b) {
    if (a == b) return Polynomial();
    int lead = std::min(a, b);
    int idx = cov.overlap_index(std::min(a, b), std::max(a, b));
    if (idx < 0) throw std::invalid_argument("charts do not overlap");
    Polynomial p = data.beta_uv[idx];  // in coordinates of chart `lead`
    if (a > b) p = -p;                 // beta_ba = -beta_ab up to transition bookkeeping
    if (target_chart == lead) return p;
    AffineChartMap into_target = transition_map(cov, target_chart, lead);
    return pullback(into_target, p);
}

CechData compute_cech(const Covering& cov) {
    CechData data;
    data.beta = local_potentials(cov);
    data.beta_uv.reserve(cov.overlaps.size());
    for (size_t i = 0; i < cov.overlaps.size(); ++i)
        data.beta_uv.push_back(transition_potential(cov, data.beta, static_cast<int>(i)));

    // recorded gauge constants beta_UV + (beta_VU pulled to U); zero with the
    // shared-anchor normalization, but kept as data for the report
    data.pair_gauge_const.reserve(cov.overlaps.size());
    for (size_t i = 0; i < cov.overlaps.size(); ++i) {
        const Overlap& ov = cov.overlaps[i];
        // beta_VU recomputed from V's side of the pair
        AffineChartMap into_v = transition_map(cov, ov.v, ov.u);
        DifferentialForm delta_vu = data.beta[ov.v] - pullback(into_v, data.beta[ov.u]);
        std::map<std::string, Rational> anchor_u = overlap_anchor(cov, static_cast<int>(i));
        std::map<std::string, Rational> anchor_v;
        const auto coords = cov.spec.coords();
        for (size_t ci = 0; ci < coords.size(); ++ci) {
            Rational shift(0);
            auto period = cov.spec.lattice_period(coords[ci]);
            if (period) shift = Rational(-ov.jump[ci]) * *period;
            anchor_v[coords[ci]] = anchor_u.at(coords[ci]) + shift;
        }
        Polynomial beta_vu = primitive_of_closed(delta_vu, anchor_v);
        AffineChartMap into_u = transition_map(cov, ov.u, ov.v);
        Polynomial sum = data.beta_uv[i] + pullback(into_u, beta_vu);
        if (!sum.is_constant())
            throw std::logic_error("beta_UV + beta_VU failed to be constant");
        data.pair_gauge_const.push_back(sum.constant_value());
    }

    data.cocycle.reserve(cov.triples.size());
    for (size_t t = 0; t < cov.triples.size(); ++t)
        data.cocycle.push_back(cocycle_constant(cov, data, static_cast<int>(t)));
    return data;
}

Rational cocycle_constant(const Covering& cov, const CechData& data, int triple_idx) {
    const TripleOverlap& tri = cov.triples[triple_idx];
    Polynomial sum = beta_uv_in_chart(cov, data, tri.u, tri.u, tri.v) +
                     beta_uv_in_chart(cov, data, tri.u, tri.v, tri.w) +
                     beta_uv_in_chart(cov, data, tri.u, tri.w, tri.u);
    if (!sum.is_constant())
        throw std::logic_error("cocycle sum is not constant; path or base-point bug");
    return sum.constant_value();
}

Rational cocycle_signed(const Covering& cov, const CechData& data, int a, int b, int c) {
    int s[3] = {a, b, c};
    int sign = 1;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2 - i; ++j) {
            if (s[j] > s[j + 1]) {
                std::swap(s[j], s[j + 1]);
                sign = -sign;
            }
        }
    }
    if (s[0] == s[1] || s[1] == s[2]) return Rational(0);
    int idx = cov.triple_index(s[0], s[1], s[2]);
    if (idx < 0) throw std::invalid_argument("no such triple overlap");
    return Rational(sign) * data.cocycle[idx];
}

IntegralityReport integrality_check(const Covering& cov, const CechData& data) {
    IntegralityReport rep;
    for (size_t t = 0; t < data.cocycle.size(); ++t) {
        if (!data.cocycle[t].is_integer()) {
            rep.integral = false;
            rep.offending_triples.push_back(static_cast<int>(t));
        }
    }
    (void)cov;
    rep.caveat =
        "integer test applies to the computed representative; a failing "
        "non-integer cocycle could in principle still be cohomologous to an "
        "integer one";
    return rep;
}

std::vector<Rational> fundamental_totals(const Covering& cov, const CechData& data) {
    const ManifoldSpec& spec = cov.spec;
    std::vector<Rational> totals(spec.pairs, Rational(0));
    for (int i = 1; i <= spec.pairs; ++i) {
        auto lx = spec.lattice_period(spec.x_name(i));
        auto lp = spec.lattice_period(spec.p_name(i));
        if (!lx || !lp) continue;  // no compact face to pair against

        auto xg = std::find(cov.gridded_coords.begin(), cov.gridded_coords.end(),
                            spec.x_name(i));
        auto pg = std::find(cov.gridded_coords.begin(), cov.gridded_coords.end(),
                            spec.p_name(i));
        size_t xi = xg - cov.gridded_coords.begin();
        size_t pi = pg - cov.gridded_coords.begin();
        int gx = cov.grid[xi];
        int gp = cov.grid[pi];

        // product triangulation of the (x_i, p_i) torus: two triangles per
        // grid cell, all other grid directions pinned to chart 0
        std::vector<int> base(cov.gridded_coords.size(), 0);
        auto chart_at = [&](int a, int b) {
            std::vector<int> gi = base;
            gi[xi] = ((a % gx) + gx) % gx;
            gi[pi] = ((b % gp) + gp) % gp;
            return cov.chart_by_grid(gi);
        };
        // oriented to pair positively with the (p, x)-oriented omega integral
        Rational acc(0);
        for (int a = 0; a < gx; ++a) {
            for (int b = 0; b < gp; ++b) {
                int c00 = chart_at(a, b);
                int c10 = chart_at(a + 1, b);
                int c11 = chart_at(a + 1, b + 1);
                int c01 = chart_at(a, b + 1);
                acc += cocycle_signed(cov, data, c00, c11, c10);
                acc += cocycle_signed(cov, data, c00, c01, c11);
            }
        }
        totals[i - 1] = acc;
    }
    return totals;
}

double omega_face_integral(const ManifoldSpec& spec, int pair_i, int panels) {
    auto lx = spec.lattice_period(spec.x_name(pair_i));
    auto lp = spec.lattice_period(spec.p_name(pair_i));
    if (!lx || !lp) return 0.0;
    Frame frame{"face", spec.coords()};
    DifferentialForm w = omega_form(spec, frame);
    // component against (dp_i, dx_i): the face is oriented by (p, x)
    Polynomial comp = w.component_named({spec.p_name(pair_i), spec.x_name(pair_i)});

    double Lx = lx->to_double();
    double Lp = lp->to_double();
    double hx = Lx / panels;
    double hp = Lp / panels;
    std::map<std::string, double> pt;
    for (const auto& c : spec.coords()) pt[c] = 0.0;
    double acc = 0.0;
    for (int a = 0; a < panels; ++a) {
        for (int b = 0; b < panels; ++b) {
            pt[spec.x_name(pair_i)] = (a + 0.5) * hx;
            pt[spec.p_name(pair_i)] = (b + 0.5) * hp;
            acc += comp.evaluate(pt) * hx * hp;
        }
    }
    return acc;
}

CechData apply_gauge(const Covering& cov, const CechData& data, const Polynomial& f) {
    for (const auto& v : f.variables()) {
        if (v == "x0" || v == "s")
            throw std::invalid_argument("gauge function must be basic (no x0, no s)");
    }
    CechData out = data;
    for (size_t c = 0; c < cov.charts.size(); ++c) {
        Frame fr = cov.chart_frame(static_cast<int>(c));
        out.beta[c] = data.beta[c] +
                      exterior_derivative(DifferentialForm::function(fr, f));
    }
    for (size_t i = 0; i < cov.overlaps.size(); ++i) {
        const Overlap& ov = cov.overlaps[i];
        AffineChartMap into_u = transition_map(cov, ov.u, ov.v);
        out.beta_uv[i] = data.beta_uv[i] + f - pullback(into_u, f);
    }
    out.cocycle.clear();
    for (size_t t = 0; t < cov.triples.size(); ++t)
        out.cocycle.push_back(cocycle_constant(cov, out, static_cast<int>(t)));
    return out;
}

}  // namespace pfw
