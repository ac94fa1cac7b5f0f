#include "pfw/flows.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace pfw {

namespace {

// 8-point Gauss-Legendre nodes and weights on [-1, 1]
constexpr double kGLNode[8] = {-0.9602898564975363, -0.7966664774136267,
                               -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
constexpr double kGLWeight[8] = {0.1012285362903763, 0.2223810344533745,
                                 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};

double golden_minimize(const std::function<double(double)>& f, double a, double b,
                       int iterations) {
    const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int i = 0; i < iterations && (b - a) > 1e-13; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? x1 : x2;
}

Eigen::VectorXd rk4_step(const CompiledField& field, const Eigen::VectorXd& y, double h) {
    Eigen::VectorXd k1 = field(y);
    Eigen::VectorXd k2 = field(y + 0.5 * h * k1);
    Eigen::VectorXd k3 = field(y + 0.5 * h * k2);
    Eigen::VectorXd k4 = field(y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

int FlowDomain::index_of(const std::string& name) const {
    for (size_t i = 0; i < coords.size(); ++i) {
        if (coords[i] == name) return static_cast<int>(i);
    }
    throw std::invalid_argument("coordinate '" + name + "' not in flow domain");
}

FlowDomain total_space_domain(const ManifoldSpec& spec) {
    FlowDomain d = base_domain(spec);
    d.coords.insert(d.coords.begin(), "s");
    d.period.insert(d.period.begin(), 1.0);
    return d;
}

FlowDomain base_domain(const ManifoldSpec& spec) {
    FlowDomain d;
    d.open_halfwidth = spec.open_halfwidth.to_double();
    for (const auto& c : spec.coords()) {
        d.coords.push_back(c);
        if (c == "x0") {
            d.period.push_back(spec.x0_period);
        } else if (auto L = spec.lattice_period(c)) {
            d.period.push_back(L->to_double());
        } else {
            d.period.push_back(std::nullopt);
        }
    }
    return d;
}

CompiledField::CompiledField(const VectorField& field, const FlowDomain& domain)
    : name_(field.str()), dim_(domain.dimension()), comps_(domain.dimension()) {
    for (const auto& [coord, poly] : field.components()) {
        int ci = domain.index_of(coord);
        const auto& vars = poly.variables();
        std::vector<int> var_slot(vars.size());
        for (size_t v = 0; v < vars.size(); ++v) var_slot[v] = domain.index_of(vars[v]);
        for (const auto& [e, c] : poly.terms()) {
            Term term;
            term.coeff = c.to_double();
            for (size_t v = 0; v < e.size(); ++v) {
                if (e[v] > 0) term.powers.emplace_back(var_slot[v], e[v]);
            }
            comps_[ci].push_back(std::move(term));
        }
    }
}

Eigen::VectorXd CompiledField::operator()(const Eigen::VectorXd& y) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
    for (int c = 0; c < dim_; ++c) {
        double acc = 0.0;
        for (const auto& term : comps_[c]) {
            double v = term.coeff;
            for (const auto& [slot, exp] : term.powers) {
                for (int k = 0; k < exp; ++k) v *= y(slot);
            }
            acc += v;
        }
        out(c) = acc;
    }
    return out;
}

Trajectory integrate(const CompiledField& field, const FlowDomain& domain,
                     const Eigen::VectorXd& start, double duration, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
    if (start.size() != domain.dimension())
        throw std::invalid_argument("start point has the wrong dimension");
    auto outside = [&](const Eigen::VectorXd& y) {
        for (int c = 0; c < domain.dimension(); ++c) {
            if (!domain.period[c] && std::abs(y(c)) > domain.open_halfwidth) return true;
        }
        return false;
    };
    if (outside(start))
        throw std::invalid_argument("start point outside the configured open box");

    Trajectory traj;
    traj.field = field.name();
    traj.step = h;
    traj.t.push_back(0.0);
    traj.y.push_back(start);

    long long steps = static_cast<long long>(std::ceil(duration / h - 1e-12));
    for (long long i = 0; i < steps; ++i) {
        double dt = std::min(h, duration - traj.t.back());
        if (dt <= 0.0) break;
        Eigen::VectorXd next = rk4_step(field, traj.y.back(), dt);
        if (outside(next)) {
            traj.left_domain = true;
            break;
        }
        traj.t.push_back(traj.t.back() + dt);
        traj.y.push_back(std::move(next));
    }
    return traj;
}

Eigen::VectorXd state_at(const CompiledField& field, const Trajectory& traj, double time) {
    if (traj.t.empty()) throw std::invalid_argument("empty trajectory");
    if (time <= traj.t.front()) return traj.y.front();
    size_t hi = std::upper_bound(traj.t.begin(), traj.t.end(), time) - traj.t.begin();
    size_t idx = hi == 0 ? 0 : hi - 1;
    if (idx >= traj.y.size()) idx = traj.y.size() - 1;
    double dt = time - traj.t[idx];
    if (dt == 0.0) return traj.y[idx];
    return rk4_step(field, traj.y[idx], dt);
}

Eigen::VectorXd wrap_point(const FlowDomain& domain, const Eigen::VectorXd& y,
                           std::vector<long long>* winding) {
    Eigen::VectorXd out = y;
    if (winding) winding->assign(domain.dimension(), 0);
    for (int c = 0; c < domain.dimension(); ++c) {
        if (!domain.period[c]) continue;
        double L = *domain.period[c];
        long long w = static_cast<long long>(std::floor(y(c) / L));
        out(c) = y(c) - static_cast<double>(w) * L;
        if (winding) (*winding)[c] = w;
    }
    return out;
}

double quotient_distance(const FlowDomain& domain, const Eigen::VectorXd& a,
                         const Eigen::VectorXd& b) {
    double acc = 0.0;
    for (int c = 0; c < domain.dimension(); ++c) {
        double d = a(c) - b(c);
        if (domain.period[c]) {
            double L = *domain.period[c];
            d = std::remainder(d, L);
        }
        acc += d * d;
    }
    return std::sqrt(acc);
}

std::vector<long long> winding_between(const FlowDomain& domain, const Eigen::VectorXd& a,
                                       const Eigen::VectorXd& b) {
    std::vector<long long> w(domain.dimension(), 0);
    for (int c = 0; c < domain.dimension(); ++c) {
        if (!domain.period[c]) continue;
        w[c] = static_cast<long long>(std::llround((b(c) - a(c)) / *domain.period[c]));
    }
    return w;
}

std::optional<double> detect_period(const CompiledField& field, const FlowDomain& domain,
                                    const Trajectory& traj, double tol) {
    size_t n = traj.y.size();
    if (n < 3) return std::nullopt;
    const Eigen::VectorXd& start = traj.y.front();

    double speed = 0.0;
    for (size_t i = 1; i < n; ++i) {
        speed = std::max(speed,
                         (traj.y[i] - traj.y[i - 1]).norm() / (traj.t[i] - traj.t[i - 1]));
    }
    double gate = 1.5 * speed * traj.step + 10.0 * tol;

    std::vector<double> dist(n);
    for (size_t i = 0; i < n; ++i) dist[i] = quotient_distance(domain, traj.y[i], start);

    for (size_t i = 1; i < n; ++i) {
        if (dist[i] >= gate) continue;
        bool local_min = dist[i] <= dist[i - 1] && (i + 1 >= n || dist[i] <= dist[i + 1]);
        if (!local_min) continue;
        // winding gate: a genuine return has wound at least one periodic direction
        std::vector<long long> w = winding_between(domain, start, traj.y[i]);
        bool wound = std::any_of(w.begin(), w.end(), [](long long x) { return x != 0; });
        if (!wound) continue;

        double lo = traj.t[i - 1];
        double hi = i + 1 < n ? traj.t[i + 1] : traj.t[i];
        auto objective = [&](double t) {
            return quotient_distance(domain, state_at(field, traj, t), start);
        };
        double t_star = golden_minimize(objective, lo, hi, 200);
        if (objective(t_star) < tol) return t_star;
    }
    return std::nullopt;
}

OrbitType classify_orbit(const std::optional<double>& x_period) {
    return x_period ? OrbitType::Torus : OrbitType::Cylinder;
}

std::vector<std::pair<std::string, double>> theta_periods(const CanonicalObjects& objs,
                                                          const FlowDomain& domain,
                                                          const Eigen::VectorXd& base) {
    if (base.size() != domain.dimension())
        throw std::invalid_argument("base point has the wrong dimension");
    std::vector<std::pair<std::string, double>> out;
    const int panels = 4;
    for (int c = 0; c < domain.dimension(); ++c) {
        if (!domain.period[c]) continue;
        double L = *domain.period[c];
        Polynomial comp = objs.theta.component({objs.frame.index_of(domain.coords[c])});
        double total = 0.0;
        if (!comp.is_zero()) {
            for (int panel = 0; panel < panels; ++panel) {
                double a = L * panel / panels;
                double b = L * (panel + 1) / panels;
                for (int g = 0; g < 8; ++g) {
                    double u = 0.5 * (a + b) + 0.5 * (b - a) * kGLNode[g];
                    std::map<std::string, double> pt;
                    for (int j = 0; j < domain.dimension(); ++j)
                        pt[domain.coords[j]] = base(j);
                    pt[domain.coords[c]] = base(c) + u;
                    total += 0.5 * (b - a) * kGLWeight[g] * comp.evaluate(pt);
                }
            }
        }
        out.emplace_back(domain.coords[c] == "s" ? "fiber" : domain.coords[c], total);
    }
    // fiber entry first
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) {
                         return (a.first == "fiber") > (b.first == "fiber");
                     });
    return out;
}

std::optional<Rational> fit_rational(double x, const RationalFitParams& params) {
    double ax = std::abs(x);
    long long sign = x < 0 ? -1 : 1;
    if (ax < 1e-300) return Rational(0);

    long long p_prev = 1, q_prev = 0;  // convergent k-1
    long long p_curr = 0, q_curr = 1;  // convergent k-2 bootstrap
    double frac = ax;
    for (int iter = 0; iter < 64; ++iter) {
        double fa = std::floor(frac);
        if (fa > 9.0e17) return std::nullopt;
        long long a = static_cast<long long>(fa);
        long long p = a * p_prev + p_curr;
        long long q = a * q_prev + q_curr;
        if (q > params.max_denominator) return std::nullopt;
        p_curr = p_prev;
        q_curr = q_prev;
        p_prev = p;
        q_prev = q;

        double rem = frac - fa;
        double err = std::abs(ax - static_cast<double>(p) / static_cast<double>(q));
        // The value counts as rational only when the continued fraction
        // effectively terminates here: the next partial quotient explodes.
        if (rem * params.term_jump < 1.0) {
            if (err <= params.tolerance) return Rational(sign * p, q);
            return std::nullopt;
        }
        frac = 1.0 / rem;
    }
    return std::nullopt;
}

TischlerResult tischler_classify(const std::vector<std::pair<std::string, double>>& periods,
                                 double zero_tol, const RationalFitParams& params) {
    TischlerResult res;
    res.ratios.assign(periods.size(), std::nullopt);

    std::vector<size_t> nonzero;
    for (size_t i = 0; i < periods.size(); ++i) {
        if (std::abs(periods[i].second) > zero_tol) nonzero.push_back(i);
        else res.ratios[i] = Rational(0);
    }

    if (nonzero.empty()) {
        res.which = TischlerCase::ExactFlagged;
        res.marker =
            "inconsistent: every period vanished, yet the fiber field contracts "
            "theta to -1, so theta cannot be exact";
        return res;
    }

    double ref = periods[nonzero.front()].second;
    bool all_rational = true;
    std::vector<Rational> fits;
    for (size_t i : nonzero) {
        auto fit = fit_rational(periods[i].second / ref, params);
        res.ratios[i] = fit;
        if (!fit) {
            all_rational = false;
        } else {
            fits.push_back(*fit);
        }
    }
    if (!all_rational) {
        res.which = TischlerCase::Dense;
        return res;
    }

    // period group = |ref| * (sum of ratio lattices); T is its positive generator
    Rational g(0);
    for (const auto& r : fits) g = gcd_rational(g, r);
    res.which = TischlerCase::Fibration;
    res.basic_period = g.to_double() * std::abs(ref);
    return res;
}

std::vector<Crossing> fiber_intersections(const CompiledField& field,
                                          const FlowDomain& domain,
                                          const Eigen::VectorXd& start, int crossings,
                                          double h, double duration_limit) {
    int x0_idx = domain.index_of("x0");
    int s_idx = domain.index_of("s");
    if (!domain.period[x0_idx])
        throw std::runtime_error(
            "x0 is unbounded: the orbit meets the start fiber at most once");
    double tau = *domain.period[x0_idx];

    Trajectory traj = integrate(field, domain, start, duration_limit, h);
    std::vector<Crossing> out;

    auto base_matches = [&](const Eigen::VectorXd& y) {
        double acc = 0.0;
        for (int c = 0; c < domain.dimension(); ++c) {
            if (c == s_idx || c == x0_idx) continue;
            double d = y(c) - start(c);
            if (domain.period[c]) d = std::remainder(d, *domain.period[c]);
            acc += d * d;
        }
        return std::sqrt(acc) < 1e-6;
    };

    for (size_t i = 0; i + 1 < traj.y.size() && static_cast<int>(out.size()) < crossings;
         ++i) {
        double g0 = (traj.y[i](x0_idx) - start(x0_idx)) / tau;
        double g1 = (traj.y[i + 1](x0_idx) - start(x0_idx)) / tau;
        long long klo = static_cast<long long>(std::ceil(std::min(g0, g1)));
        long long khi = static_cast<long long>(std::floor(std::max(g0, g1)));
        for (long long k = klo; k <= khi && static_cast<int>(out.size()) < crossings;
             ++k) {
            if (k == 0 && traj.t[i] == 0.0 && g0 == 0.0) continue;  // the start itself
            double level = start(x0_idx) + static_cast<double>(k) * tau;
            double lo = traj.t[i];
            double hi = traj.t[i + 1];
            double flo = traj.y[i](x0_idx) - level;
            for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
                double mid = 0.5 * (lo + hi);
                double fmid = state_at(field, traj, mid)(x0_idx) - level;
                if ((fmid < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fmid;
                } else {
                    hi = mid;
                }
            }
            double t_star = 0.5 * (lo + hi);
            Eigen::VectorXd y_star = state_at(field, traj, t_star);
            if (!base_matches(y_star)) continue;  // section hit off the fiber
            double s_val = y_star(s_idx) - std::floor(y_star(s_idx));
            out.push_back(Crossing{t_star, s_val});
        }
    }

    if (static_cast<int>(out.size()) < crossings) {
        std::ostringstream os;
        os << "insufficient duration: recorded " << out.size() << " of " << crossings
           << " fiber crossings";
        throw std::runtime_error(os.str());
    }
    return out;
}

int distinct_circular_values(std::vector<double> values, double period, double gap_tol) {
    if (values.empty()) return 0;
    if (values.size() == 1) return 1;
    for (auto& v : values) v -= period * std::floor(v / period);
    std::sort(values.begin(), values.end());
    int breaks = 0;
    for (size_t i = 1; i < values.size(); ++i) {
        if (values[i] - values[i - 1] > gap_tol) ++breaks;
    }
    double wrap = values.front() + period - values.back();
    if (wrap > gap_tol) ++breaks;
    return std::max(1, breaks);
}

double max_circular_gap(std::vector<double> values, double period) {
    if (values.empty()) return period;
    for (auto& v : values) v -= period * std::floor(v / period);
    std::sort(values.begin(), values.end());
    double worst = values.front() + period - values.back();
    for (size_t i = 1; i < values.size(); ++i)
        worst = std::max(worst, values[i] - values[i - 1]);
    return worst;
}

FoliationReport run_flow_experiment(const WeylBundle& bundle, const FlowParams& params,
                                    std::uint64_t seed) {
    const ManifoldSpec& spec = bundle.cover.spec;
    FoliationReport rep;
    SplitMix64 rng(seed);
    auto fail = [&rep](const std::string& why) {
        rep.all_pass = false;
        rep.failures.push_back(why);
    };

    CanonicalObjects objs =
        canonical_objects(spec, bundle.cover.charts.front().id, Polynomial());
    FlowDomain dom = total_space_domain(spec);
    FlowDomain base_dom = base_domain(spec);

    // generic start in the fundamental domain
    Eigen::VectorXd start = Eigen::VectorXd::Zero(dom.dimension());
    for (int c = 0; c < dom.dimension(); ++c) {
        double width = dom.period[c] ? *dom.period[c] : 1.0;
        start(c) = 0.5 * width * (0.25 + 0.5 * rng.uniform());
    }

    CompiledField E(VectorField::coordinate(objs.frame, "s"), dom);
    CompiledField X(VectorField::coordinate(objs.frame, "x0"), dom);
    CompiledField Y(VectorField::coordinate(objs.frame, "s") +
                        VectorField::coordinate(objs.frame, "x0"),
                    dom);

    // fiber field period: always 1 by construction of the bundle
    {
        Trajectory e_orbit = integrate(E, dom, start, 2.5, params.step);
        auto period = detect_period(E, dom, e_orbit, params.period_tol);
        rep.e_period = period.value_or(0.0);
        if (!period || std::abs(*period - 1.0) > params.multiplicity_tol)
            fail("fiber field period differs from 1");
    }

    // X orbit and its type
    double tau = spec.x0_period.value_or(0.0);
    double x_duration = std::max(params.orbit_duration, tau > 0 ? 2.5 * tau : 0.0);
    {
        Trajectory x_orbit = integrate(X, dom, start, x_duration, params.step);
        rep.x_orbit_period = detect_period(X, dom, x_orbit, params.period_tol);
        rep.orbit = classify_orbit(rep.x_orbit_period);
    }

    rep.periods = theta_periods(objs, dom, start);
    rep.tischler = tischler_classify(rep.periods);
    for (const auto& [label, value] : rep.periods) {
        if (label == "fiber") rep.fiber_period = value;
    }
    rep.theta_exact = rep.tischler.which == TischlerCase::ExactFlagged;
    if (std::abs(rep.fiber_period + 1.0) > 1e-9)
        fail("theta fiber period differs from -1");
    if (rep.theta_exact) fail("classification reached the flagged exact case");

    // fiber crossings of the Y orbit
    if (spec.x0_period) {
        int want = rep.tischler.which == TischlerCase::Dense ? params.case3_crossings
                                                             : params.case2_crossings;
        double limit = (static_cast<double>(want) + 3.0) * tau + 2.0;
        std::vector<Crossing> hits =
            fiber_intersections(Y, dom, start, want, params.step, limit);
        rep.crossings_recorded = static_cast<int>(hits.size());
        std::vector<double> svals;
        svals.reserve(hits.size());
        for (const auto& c : hits) svals.push_back(c.s);

        if (rep.tischler.which == TischlerCase::Fibration) {
            rep.covering_count = distinct_circular_values(svals, 1.0, params.cluster_gap);
            if (rep.x_orbit_period)
                rep.ell_times_to = rep.covering_count * *rep.x_orbit_period;
            rep.ell_times_t = rep.covering_count * rep.tischler.basic_period;
            if (std::abs(rep.ell_times_to - 1.0) > params.multiplicity_tol)
                fail("ell * T_O differs from 1");
            if (std::abs(rep.ell_times_t - 1.0) > params.multiplicity_tol)
                fail("ell * T differs from 1");
        } else if (rep.tischler.which == TischlerCase::Dense) {
            rep.max_fiber_gap = max_circular_gap(svals, 1.0);
            if (rep.max_fiber_gap >= params.gap_threshold)
                fail("fiber crossing gap statistic above threshold");
        }
    }

    // period multiplicity over random starts; only orbits that do close are
    // constrained, so the cylinder case yields an empty applicable table
    if (rep.tischler.which == TischlerCase::Fibration) {
        rep.multiplicity_applicable = true;
        bool expect_closure = rep.x_orbit_period.has_value();
        double T = rep.tischler.basic_period;
        VectorField xi = characteristic_field(Frame{"M", spec.coords()});
        CompiledField xi_c(xi, base_dom);
        auto push_row = [&](const std::string& name, std::optional<double> period) {
            if (!period) {
                if (expect_closure)
                    fail(name + " orbit failed to close in the fibration case");
                return;
            }
            MultiplicityRow row;
            row.field = name;
            row.period = *period;
            row.multiplier = *period / T;
            row.nearest = std::llround(row.multiplier);
            row.integral =
                std::abs(row.multiplier - row.nearest) < params.multiplicity_tol &&
                row.nearest >= 1;
            if (!row.integral) fail(name + " period is not an integer multiple of T");
            rep.multiplicity.push_back(row);
        };
        for (int trial = 0; trial < params.multiplicity_trials; ++trial) {
            Eigen::VectorXd y0 = Eigen::VectorXd::Zero(dom.dimension());
            for (int c = 0; c < dom.dimension(); ++c) {
                double width = dom.period[c] ? *dom.period[c] : 1.0;
                y0(c) = width * rng.uniform();
            }
            Trajectory x_orbit = integrate(X, dom, y0, x_duration, params.step);
            push_row("X", detect_period(X, dom, x_orbit, params.period_tol));

            Eigen::VectorXd b0 = y0.tail(base_dom.dimension());
            Trajectory xi_orbit = integrate(xi_c, base_dom, b0, x_duration, params.step);
            push_row("xi", detect_period(xi_c, base_dom, xi_orbit, params.period_tol));
        }
    }

    return rep;
}

}  // namespace pfw
