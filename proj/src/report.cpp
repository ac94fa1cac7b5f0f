#include "pfw/report.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace pfw {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

Rational rational_from_json(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    throw std::invalid_argument("expected an integer or a \"p/q\" string");
}

std::optional<Rational> opt_rational_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return rational_from_json(j);
}

double walltime_ms(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     t0)
        .count();
}

std::string verdict(bool applicable, bool pass) {
    if (!applicable) return "not-applicable";
    return pass ? "pass" : "fail";
}

ordered_json covering_json(const Covering& cov) {
    ordered_json j;
    j["chart_count"] = cov.charts.size();
    j["overlap_count"] = cov.overlaps.size();
    j["triple_count"] = cov.triples.size();
    j["gridded_coordinates"] = cov.gridded_coords;
    j["grid"] = cov.grid;
    j["basic_exact_case"] = cov.triples.empty();
    return j;
}

ordered_json cech_json(const Covering& cov, const CechData& data,
                       const IntegralityReport& integ) {
    ordered_json j;
    ordered_json table = ordered_json::array();
    for (size_t t = 0; t < cov.triples.size(); ++t) {
        const TripleOverlap& tri = cov.triples[t];
        ordered_json row;
        row["charts"] = {cov.charts[tri.u].id, cov.charts[tri.v].id,
                         cov.charts[tri.w].id};
        row["c"] = data.cocycle[t].str();
        table.push_back(std::move(row));
    }
    j["cocycle"] = std::move(table);

    ordered_json integrality;
    integrality["integral"] = integ.integral;
    ordered_json offenders = ordered_json::array();
    for (int t : integ.offending_triples) {
        const TripleOverlap& tri = cov.triples[t];
        ordered_json row;
        row["charts"] = {cov.charts[tri.u].id, cov.charts[tri.v].id,
                         cov.charts[tri.w].id};
        row["c"] = data.cocycle[t].str();
        offenders.push_back(std::move(row));
    }
    integrality["offending_triples"] = std::move(offenders);
    integrality["caveat"] = integ.caveat;
    j["integrality"] = std::move(integrality);

    std::vector<Rational> totals = fundamental_totals(cov, data);
    ordered_json totals_json = ordered_json::array();
    bool totals_ok = true;
    for (size_t i = 0; i < totals.size(); ++i) {
        double oracle = omega_face_integral(cov.spec, static_cast<int>(i) + 1, 16);
        double diff = std::abs(totals[i].to_double() - oracle);
        ordered_json row;
        row["pair"] = i + 1;
        row["cocycle_total"] = totals[i].str();
        row["omega_integral"] = oracle;
        row["difference"] = diff;
        totals_ok = totals_ok && diff < 1e-9;
        totals_json.push_back(std::move(row));
    }
    j["fundamental_totals"] = std::move(totals_json);
    j["totals_match_omega_integral"] = totals_ok;

    // recorded beta_UV + beta_VU gauge constants; zero under the shared-anchor
    // normalization
    bool gauge_zero = true;
    for (const auto& c : data.pair_gauge_const) gauge_zero = gauge_zero && c.is_zero();
    j["pair_gauge_constants_all_zero"] = gauge_zero;
    return j;
}

ordered_json identity_json(const IdentityReport& rep) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : rep.rows) {
        ordered_json row;
        row["name"] = r.name;
        row["statement"] = r.statement;
        row["status"] = r.pass ? "pass" : "fail";
        row["residual"] = r.pass ? "exact-zero" : "nonzero";
        if (!r.note.empty()) row["note"] = r.note;
        rows.push_back(std::move(row));
    }
    ordered_json j;
    j["rows"] = std::move(rows);
    j["all_pass"] = rep.all_pass;
    return j;
}

ordered_json foliation_json(const FoliationReport& rep) {
    ordered_json j;
    ordered_json periods = ordered_json::array();
    for (const auto& [label, value] : rep.periods) {
        ordered_json row;
        row["cycle"] = label;
        row["value"] = value;
        periods.push_back(std::move(row));
    }
    j["theta_periods"] = std::move(periods);
    switch (rep.tischler.which) {
        case TischlerCase::ExactFlagged:
            j["tischler_case"] = "case1-flagged";
            break;
        case TischlerCase::Fibration:
            j["tischler_case"] = "case2-fibration";
            break;
        case TischlerCase::Dense:
            j["tischler_case"] = "case3-dense";
            break;
    }
    if (!rep.tischler.marker.empty()) j["inconsistency_marker"] = rep.tischler.marker;
    j["theta_exact"] = rep.theta_exact;
    j["fiber_period"] = rep.fiber_period;
    j["e_period"] = rep.e_period;
    if (rep.tischler.which == TischlerCase::Fibration)
        j["basic_period_T"] = rep.tischler.basic_period;
    if (rep.x_orbit_period) {
        j["x_orbit_period_TO"] = *rep.x_orbit_period;
    } else {
        j["x_orbit_period_TO"] = nullptr;
    }
    j["orbit_type"] = rep.orbit == OrbitType::Torus ? "torus" : "cylinder";
    j["crossings_recorded"] = rep.crossings_recorded;
    if (rep.tischler.which == TischlerCase::Fibration) {
        j["covering_count_ell"] = rep.covering_count;
        j["ell_times_TO"] = rep.ell_times_to;
        j["ell_times_T"] = rep.ell_times_t;
    }
    if (rep.tischler.which == TischlerCase::Dense) {
        j["max_fiber_gap"] = rep.max_fiber_gap;
    }
    return j;
}

ordered_json multiplicity_json(const FoliationReport& rep) {
    ordered_json j;
    j["applicable"] = rep.multiplicity_applicable;
    ordered_json rows = ordered_json::array();
    for (const auto& r : rep.multiplicity) {
        ordered_json row;
        row["field"] = r.field;
        row["period"] = r.period;
        row["multiplier"] = r.multiplier;
        row["nearest_integer"] = r.nearest;
        row["integral"] = r.integral;
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j;
}

void emit_orbit_csv(const std::string& path, const ManifoldSpec& spec,
                    const FlowParams& params) {
    FlowDomain dom = total_space_domain(spec);
    Frame fr = total_space_frame(spec, "orbit");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open orbit CSV path: " + path);
    out << "orbit,t";
    for (const auto& c : dom.coords) out << "," << c;
    for (const auto& c : dom.coords) out << ",w_" << c;
    out << "\n";
    out.precision(17);

    auto dump = [&](const std::string& name, const VectorField& field) {
        CompiledField compiled(field, dom);
        Eigen::VectorXd start = Eigen::VectorXd::Zero(dom.dimension());
        for (int c = 0; c < dom.dimension(); ++c)
            start(c) = dom.period[c] ? 0.25 * *dom.period[c] : 0.25;
        Trajectory traj =
            integrate(compiled, dom, start, params.orbit_duration, params.step);
        size_t stride = std::max<size_t>(1, traj.y.size() / 512);
        for (size_t i = 0; i < traj.y.size(); i += stride) {
            std::vector<long long> w;
            Eigen::VectorXd q = wrap_point(dom, traj.y[i], &w);
            out << name << "," << traj.t[i];
            for (int c = 0; c < dom.dimension(); ++c) out << "," << q(c);
            for (int c = 0; c < dom.dimension(); ++c) out << "," << w[c];
            out << "\n";
        }
    };
    dump("E", VectorField::coordinate(fr, "s"));
    dump("X", VectorField::coordinate(fr, "x0"));
    dump("Y", VectorField::coordinate(fr, "s") + VectorField::coordinate(fr, "x0"));
}

}  // namespace

RunConfig RunConfig::defaults() {
    RunConfig cfg;
    cfg.manifold.pairs = 1;
    cfg.manifold.scale = Rational(1);
    cfg.manifold.x_period = {Rational(1)};
    cfg.manifold.p_period = {Rational(1)};
    cfg.manifold.x0_period = 1.0;
    return cfg;
}

RunConfig RunConfig::from_json(const json& j) {
    RunConfig cfg = defaults();
    try {
        if (j.contains("manifold")) {
            const json& m = j.at("manifold");
            ManifoldSpec spec;
            spec.pairs = m.value("n", 1);
            if (m.contains("k")) spec.scale = rational_from_json(m.at("k"));
            spec.x_period.assign(spec.pairs, Rational(1));
            spec.p_period.assign(spec.pairs, Rational(1));
            if (m.contains("x_periods")) {
                const json& xs = m.at("x_periods");
                if (static_cast<int>(xs.size()) != spec.pairs)
                    throw std::invalid_argument("x_periods must list one entry per pair");
                for (int i = 0; i < spec.pairs; ++i)
                    spec.x_period[i] = opt_rational_from_json(xs.at(i));
            }
            if (m.contains("p_periods")) {
                const json& ps = m.at("p_periods");
                if (static_cast<int>(ps.size()) != spec.pairs)
                    throw std::invalid_argument("p_periods must list one entry per pair");
                for (int i = 0; i < spec.pairs; ++i)
                    spec.p_period[i] = opt_rational_from_json(ps.at(i));
            }
            if (m.contains("x0_period")) {
                const json& tau = m.at("x0_period");
                if (tau.is_null()) {
                    spec.x0_period = std::nullopt;
                } else if (tau.is_number()) {
                    spec.x0_period = tau.get<double>();
                } else if (tau.is_string()) {
                    spec.x0_period = Rational::parse(tau.get<std::string>()).to_double();
                } else {
                    throw std::invalid_argument("x0_period must be null, number or string");
                }
            }
            if (m.contains("open_halfwidth"))
                spec.open_halfwidth = rational_from_json(m.at("open_halfwidth"));
            spec.validate();
            cfg.manifold = spec;
        }
        cfg.grid = j.value("grid", cfg.grid);
        cfg.gauge_trials = j.value("gauge_trials", cfg.gauge_trials);
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("flow")) {
            const json& f = j.at("flow");
            cfg.flow.step = f.value("step", cfg.flow.step);
            cfg.flow.orbit_duration = f.value("orbit_duration", cfg.flow.orbit_duration);
            cfg.flow.case2_crossings = f.value("case2_crossings", cfg.flow.case2_crossings);
            cfg.flow.case3_crossings = f.value("case3_crossings", cfg.flow.case3_crossings);
            cfg.flow.period_tol = f.value("period_tol", cfg.flow.period_tol);
            cfg.flow.cluster_gap = f.value("cluster_gap", cfg.flow.cluster_gap);
            cfg.flow.gap_threshold = f.value("gap_threshold", cfg.flow.gap_threshold);
            cfg.flow.multiplicity_trials =
                f.value("multiplicity_trials", cfg.flow.multiplicity_trials);
            cfg.flow.multiplicity_tol =
                f.value("multiplicity_tol", cfg.flow.multiplicity_tol);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed config: ") + e.what());
    }
    if (cfg.grid < 3) throw std::invalid_argument("grid must be >= 3");
    if (cfg.gauge_trials < 0) throw std::invalid_argument("gauge_trials must be >= 0");
    if (!(cfg.flow.step > 0) || !(cfg.flow.period_tol > 0) ||
        !(cfg.flow.gap_threshold > 0) || !(cfg.flow.multiplicity_tol > 0))
        throw std::invalid_argument("flow tolerances and step must be positive");
    return cfg;
}

RunOutcome run_subcommand(const std::string& command, const RunConfig& config) {
    static const std::set<std::string> known = {"cech",  "bundle",   "identities",
                                                "flows", "classify", "all"};
    if (known.find(command) == known.end())
        throw std::invalid_argument("unknown subcommand: " + command);

    bool want_cech = command != "identities";
    bool want_bundle = command == "bundle" || command == "flows" ||
                       command == "classify" || command == "all";
    bool want_identities = command == "identities" || command == "all";
    bool want_flows = command == "flows" || command == "classify" || command == "all";
    bool flows_full = command == "flows" || command == "all";

    auto t0 = std::chrono::steady_clock::now();
    RunOutcome out;
    ordered_json& rep = out.report;
    rep["tool"] = "pfweyl";
    rep["command"] = command;
    rep["seed"] = config.seed;
    {
        ordered_json cfg;
        cfg["n"] = config.manifold.pairs;
        cfg["k"] = config.manifold.scale.str();
        ordered_json xs = ordered_json::array();
        for (const auto& x : config.manifold.x_period)
            xs.push_back(x ? ordered_json(x->str()) : ordered_json(nullptr));
        cfg["x_periods"] = xs;
        ordered_json ps = ordered_json::array();
        for (const auto& p : config.manifold.p_period)
            ps.push_back(p ? ordered_json(p->str()) : ordered_json(nullptr));
        cfg["p_periods"] = ps;
        if (config.manifold.x0_period) {
            cfg["x0_period"] = *config.manifold.x0_period;
        } else {
            cfg["x0_period"] = nullptr;
        }
        cfg["grid"] = config.grid;
        cfg["gauge_trials"] = config.gauge_trials;
        rep["config"] = std::move(cfg);
    }

    int failures = 0;
    ordered_json timings;

    std::optional<Covering> cover;
    std::optional<CechData> cech;
    std::optional<WeylBundle> bundle;
    bool integrality_blocked = false;

    if (want_cech) {
        auto tc = std::chrono::steady_clock::now();
        cover = build_covering(config.manifold, config.grid);
        cech = compute_cech(*cover);
        IntegralityReport integ = integrality_check(*cover, *cech);
        rep["covering"] = covering_json(*cover);
        rep["cech"] = cech_json(*cover, *cech, integ);
        if (!rep["cech"]["totals_match_omega_integral"].get<bool>()) ++failures;
        timings["cech_ms"] = walltime_ms(tc);

        if (want_bundle) {
            if (integ.integral) {
                bundle = build_bundle(*cover, *cech);
                SplitMix64 rng(config.seed ^ 0x9c0ffee1ULL);
                double residual = verify_cocycle_numeric(*cover, *cech, 100, rng);
                ordered_json b;
                b["built"] = true;
                b["fiber_period"] = 1;
                b["cocycle_residual"] = residual;
                b["cocycle_residual_ok"] = residual < 1e-12;
                if (residual >= 1e-12) ++failures;
                rep["bundle"] = std::move(b);
            } else {
                integrality_blocked = true;
                ordered_json b;
                b["built"] = false;
                b["error"] = "integrality condition violated";
                rep["bundle"] = std::move(b);
            }
        }
    }

    if (want_identities) {
        auto ti = std::chrono::steady_clock::now();
        SplitMix64 rng(config.seed ^ 0x1d51ULL);
        std::vector<std::string> basic_vars;
        for (int i = 1; i <= config.manifold.pairs; ++i) {
            basic_vars.push_back(config.manifold.x_name(i));
            basic_vars.push_back(config.manifold.p_name(i));
        }
        IdentityReport canonical =
            run_identity_suite(canonical_objects(config.manifold, "U", Polynomial()));
        bool gauges_pass = true;
        int gauge_rows = 0;
        for (int trial = 0; trial < config.gauge_trials; ++trial) {
            Polynomial f = random_polynomial(basic_vars, 3, 4, rng);
            IdentityReport shifted =
                run_identity_suite(canonical_objects(config.manifold, "U", f));
            gauges_pass = gauges_pass && shifted.all_pass;
            gauge_rows += static_cast<int>(shifted.rows.size());
        }
        rep["identities"] = identity_json(canonical);
        rep["identities"]["gauge_trials"] = config.gauge_trials;
        rep["identities"]["gauge_trials_pass"] = gauges_pass;
        rep["identities"]["gauge_rows_checked"] = gauge_rows;
        if (!canonical.all_pass || !gauges_pass) ++failures;
        timings["identities_ms"] = walltime_ms(ti);
    }

    if (want_flows && bundle) {
        auto tf = std::chrono::steady_clock::now();
        FlowParams params = config.flow;
        if (!flows_full) {
            params.multiplicity_trials = 0;  // classify: skip the orbit batteries
        }
        FoliationReport fol = run_flow_experiment(*bundle, params, config.seed);
        rep["foliation"] = foliation_json(fol);
        if (flows_full) rep["propositions"] = multiplicity_json(fol);
        if (!fol.all_pass) {
            ++failures;
            rep["foliation"]["failures"] = fol.failures;
        }
        timings["flows_ms"] = walltime_ms(tf);

        if (!config.orbit_csv.empty())
            emit_orbit_csv(config.orbit_csv, config.manifold, config.flow);
    }

    ordered_json verdicts;
    if (want_cech)
        verdicts["cech"] =
            verdict(true, rep["cech"]["totals_match_omega_integral"].get<bool>());
    if (want_bundle)
        verdicts["bundle"] =
            integrality_blocked
                ? "fail"
                : verdict(true, rep["bundle"]["cocycle_residual_ok"].get<bool>());
    if (want_identities)
        verdicts["identities"] =
            verdict(true, rep["identities"]["all_pass"].get<bool>() &&
                              rep["identities"]["gauge_trials_pass"].get<bool>());
    if (want_flows)
        verdicts["foliation"] = bundle ? verdict(true, !rep["foliation"].contains(
                                                           "failures"))
                                       : "not-applicable";
    rep["verdicts"] = std::move(verdicts);
    rep["failed_checks"] = failures + (integrality_blocked ? 1 : 0);
    if (config.timings) {
        timings["total_ms"] = walltime_ms(t0);
        rep["timings_ms"] = std::move(timings);
    }

    if (integrality_blocked) {
        out.exit_code = 3;
    } else {
        out.exit_code = failures == 0 ? 0 : 1;
    }
    return out;
}

}  // namespace pfw
