#ifndef PFW_FLOWS_HPP
#define PFW_FLOWS_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "pfw/weyl.hpp"

namespace pfw {

/// Numeric view of a quotient: coordinate list, optional real period per
/// coordinate, and a half-width bound for the unbounded directions.
struct FlowDomain {
    std::vector<std::string> coords;
    std::vector<std::optional<double>> period;
    double open_halfwidth = 8.0;

    int dimension() const { return static_cast<int>(coords.size()); }
    int index_of(const std::string& name) const;
};

/// Domain of the bundle total space (s, x0, x^i, p_i), fiber period 1.
FlowDomain total_space_domain(const ManifoldSpec& spec);
/// Domain of the base (x0, x^i, p_i).
FlowDomain base_domain(const ManifoldSpec& spec);

/// Vector field flattened for fast evaluation along trajectories.
class CompiledField {
public:
    CompiledField(const VectorField& field, const FlowDomain& domain);

    const std::string& name() const { return name_; }
    int dimension() const { return dim_; }
    Eigen::VectorXd operator()(const Eigen::VectorXd& y) const;

private:
    struct Term {
        double coeff;
        std::vector<std::pair<int, int>> powers;  // (coordinate, exponent)
    };
    std::string name_;
    int dim_;
    std::vector<std::vector<Term>> comps_;
};

struct Trajectory {
    std::string field;
    double step = 0.0;
    std::vector<double> t;
    std::vector<Eigen::VectorXd> y;  // universal-cover lift
    bool left_domain = false;        // truncated at the open-box boundary
};

/// Fixed-step classical Runge-Kutta in the universal cover. Truncates (with
/// left_domain set) once an unbounded coordinate leaves the configured box;
/// throws std::invalid_argument when the start is already outside.
Trajectory integrate(const CompiledField& field, const FlowDomain& domain,
                     const Eigen::VectorXd& start, double duration, double h);

/// Single Runge-Kutta state at an arbitrary time along a stored trajectory
/// (re-steps from the nearest stored sample).
Eigen::VectorXd state_at(const CompiledField& field, const Trajectory& traj, double time);

/// Fundamental-domain representative plus the integer windings removed.
Eigen::VectorXd wrap_point(const FlowDomain& domain, const Eigen::VectorXd& y,
                           std::vector<long long>* winding = nullptr);
/// Distance on the quotient: circular per periodic coordinate, plain
/// otherwise, Euclidean across coordinates.
double quotient_distance(const FlowDomain& domain, const Eigen::VectorXd& a,
                         const Eigen::VectorXd& b);
/// Nearest winding vector from a to b (periodic coordinates only; zero slots
/// elsewhere).
std::vector<long long> winding_between(const FlowDomain& domain, const Eigen::VectorXd& a,
                                       const Eigen::VectorXd& b);

/// Earliest return time of the trajectory to its start, on the quotient:
/// local minima of the quotient distance are bracketed from the samples,
/// refined by golden-section bisection, and accepted below tol. Candidates
/// with an all-zero winding vector are rejected (near-return gating).
std::optional<double> detect_period(const CompiledField& field, const FlowDomain& domain,
                                    const Trajectory& traj, double tol);

enum class OrbitType { Torus, Cylinder };
/// Torus iff the X-orbit closes.
OrbitType classify_orbit(const std::optional<double>& x_period);

/// Labeled line integrals of theta over the generating cycles (fiber first,
/// then every periodic coordinate), composite Gauss-Legendre quadrature.
std::vector<std::pair<std::string, double>> theta_periods(const CanonicalObjects& objs,
                                                          const FlowDomain& domain,
                                                          const Eigen::VectorXd& base);

struct RationalFitParams {
    long long max_denominator = 1000000;
    double tolerance = 1e-9;       // absolute acceptance guard
    double term_jump = 1e6;        // continued-fraction cutoff signalling exactness
};

/// Continued-fraction reconstruction of x as an exact rational. Accepts a
/// convergent only when the next partial quotient explodes (the value is
/// rational to working precision) and the stated guards hold; returns nullopt
/// for badly approximable values such as sqrt(2).
std::optional<Rational> fit_rational(double x, const RationalFitParams& params = {});

enum class TischlerCase { ExactFlagged = 1, Fibration = 2, Dense = 3 };

struct TischlerResult {
    TischlerCase which = TischlerCase::Dense;
    double basic_period = 0.0;  // generator T of the period group, Fibration only
    std::string marker;         // inconsistency marker for the flagged exact case
    std::vector<std::optional<Rational>> ratios;  // per nonzero period, vs the first
};

/// Trichotomy for the closed nowhere-zero 1-form: all periods zero would mean
/// an exact form (impossible here, hence flagged), commensurate periods give
/// a fibration over the circle with basic period T, anything else is the
/// dense-leaf case.
TischlerResult tischler_classify(const std::vector<std::pair<std::string, double>>& periods,
                                 double zero_tol = 1e-9,
                                 const RationalFitParams& params = {});

struct Crossing {
    double time = 0.0;
    double s = 0.0;  // fiber coordinate mod 1
};

/// Crossings of the Y-orbit with the fiber circle over the start's base
/// point: x0 passes the start level mod tau (sign change + bisection), the
/// other base coordinates are required to match, and s mod 1 is recorded.
/// Throws std::runtime_error when duration_limit gives fewer crossings than
/// requested.
std::vector<Crossing> fiber_intersections(const CompiledField& field,
                                          const FlowDomain& domain,
                                          const Eigen::VectorXd& start, int crossings,
                                          double h, double duration_limit);

/// Number of distinct values mod `period`, clusters separated by gap_tol.
int distinct_circular_values(std::vector<double> values, double period, double gap_tol);
/// Largest circular gap (values taken mod `period`).
double max_circular_gap(std::vector<double> values, double period);

struct FlowParams {
    double step = 1e-3;
    double orbit_duration = 3.5;
    int case2_crossings = 24;
    int case3_crossings = 200;
    double period_tol = 1e-8;       // refinement acceptance for returns
    double cluster_gap = 1e-4;      // crossing-class separation
    double gap_threshold = 0.02;    // density statistic bound
    int multiplicity_trials = 6;
    double multiplicity_tol = 1e-6;
};

struct MultiplicityRow {
    std::string field;       // "X" or "xi"
    double period = 0.0;
    double multiplier = 0.0; // period / T
    long long nearest = 0;
    bool integral = false;
};

struct FoliationReport {
    std::vector<std::pair<std::string, double>> periods;  // theta over cycles
    TischlerResult tischler;
    double fiber_period = 0.0;   // theta over the fiber cycle, expected -1
    bool theta_exact = false;    // only in the flagged case
    double e_period = 0.0;       // detected period of the fiber field
    std::optional<double> x_orbit_period;  // T_O when the X-orbit closes
    OrbitType orbit = OrbitType::Cylinder;
    int covering_count = 0;      // ell: distinct fiber-crossing classes
    double ell_times_to = 0.0;   // ell * detected X-orbit period
    double ell_times_t = 0.0;    // ell * basic period T
    double max_fiber_gap = 0.0;  // density statistic (dense case)
    int crossings_recorded = 0;
    std::vector<MultiplicityRow> multiplicity;  // Fibration case only
    bool multiplicity_applicable = false;
    bool all_pass = true;
    std::vector<std::string> failures;
};

/// Full flow experiment battery on a built bundle.
FoliationReport run_flow_experiment(const WeylBundle& bundle, const FlowParams& params,
                                    std::uint64_t seed);

}  // namespace pfw

#endif
