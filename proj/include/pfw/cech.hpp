#ifndef PFW_CECH_HPP
#define PFW_CECH_HPP

#include <string>
#include <vector>

#include "pfw/manifold.hpp"

namespace pfw {

/// Per-cover exact data: local potentials beta_U with d(beta_U) = omega,
/// transition potentials beta_UV with d(beta_UV) = beta_U - beta_V, and the
/// constants c_UVW = beta_UV + beta_VW + beta_WU on triple overlaps.
struct CechData {
    std::vector<DifferentialForm> beta;       // per chart, on that chart's frame
    std::vector<Polynomial> beta_uv;          // per overlap, in U coordinates
    std::vector<Rational> cocycle;            // per triple overlap
    std::vector<Rational> pair_gauge_const;   // beta_UV + (beta_VU pulled to U), per overlap
};

/// omega = k * sum_i dp_i ^ dx^i on the given chart frame.
DifferentialForm omega_form(const ManifoldSpec& spec, const Frame& frame);
/// The structure 1-form dx0 + k * p_i dx^i.
DifferentialForm alpha_form(const ManifoldSpec& spec, const Frame& frame);
/// The characteristic field d/dx0.
VectorField characteristic_field(const Frame& frame);

/// beta_U = k * (p_i + lift_i L_i) dx^i, using the chart's lattice lift.
DifferentialForm local_potential(const Covering& cov, int chart);
std::vector<DifferentialForm> local_potentials(const Covering& cov);

/// Primitive of a closed 1-form on a box, by axis-ordered path integration
/// from the base point; vanishes at the base point. The order argument
/// permutes the integration axes (defaults to frame order); closedness makes
/// the result independent of it, which the tests exercise. Throws
/// std::invalid_argument when the input is not closed.
Polynomial primitive_of_closed(const DifferentialForm& one_form,
                               const std::map<std::string, Rational>& base,
                               const std::vector<int>* axis_order = nullptr);

/// beta_UV for one overlap: the primitive of beta_U - beta_V (the latter
/// pulled to U coordinates) anchored at the lattice-rounded center of the
/// overlap box. Verifies closedness and the primitive property exactly.
Polynomial transition_potential(const Covering& cov,
                                const std::vector<DifferentialForm>& beta,
                                int overlap_idx);

/// Anchor used by transition_potential: overlap box center with every
/// lattice-periodic coordinate rounded to the nearest period multiple.
std::map<std::string, Rational> overlap_anchor(const Covering& cov, int overlap_idx);

/// beta_ab as a polynomial in the coordinates of target_chart, for any
/// ordered chart pair (a, b) of the cover (antisymmetry and transition
/// bookkeeping included).
Polynomial beta_uv_in_chart(const Covering& cov, const CechData& data, int target_chart,
                            int a, int b);

/// Full pipeline: potentials, transition potentials, cocycle constants.
CechData compute_cech(const Covering& cov);

/// c for one triple; throws std::logic_error if the sum fails to be constant.
Rational cocycle_constant(const Covering& cov, const CechData& data, int triple_idx);

/// c with arbitrary argument order, via total antisymmetry.
Rational cocycle_signed(const Covering& cov, const CechData& data, int a, int b, int c);

struct IntegralityReport {
    bool integral = true;
    std::vector<int> offending_triples;
    std::string caveat;
};

/// Exact integer test on every stored c_UVW; no tolerances.
IntegralityReport integrality_check(const Covering& cov, const CechData& data);

/// Signed cocycle total over the product-triangulation fundamental cycle of
/// each (x_i, p_i) torus face. Equals k * L_x * L_p when both directions are
/// periodic; entries for faces with an unbounded direction are zero.
std::vector<Rational> fundamental_totals(const Covering& cov, const CechData& data);

/// Midpoint-rule integral of omega over the (p_i, x_i)-oriented fundamental
/// face; numeric cross-check for fundamental_totals.
double omega_face_integral(const ManifoldSpec& spec, int pair_i, int panels);

/// Gauge transform beta_U -> beta_U + df with f basic (a polynomial in the
/// x^i, p_i only): transition potentials pick up f - f-pulled-back, and the
/// cocycle constants are exactly unchanged.
CechData apply_gauge(const Covering& cov, const CechData& data, const Polynomial& f);

}  // namespace pfw

#endif
