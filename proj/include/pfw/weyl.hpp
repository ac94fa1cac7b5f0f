#ifndef PFW_WEYL_HPP
#define PFW_WEYL_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "pfw/cech.hpp"
#include "pfw/sampling.hpp"

namespace pfw {

/// Thrown when the cocycle constants are not all integers: the circle-bundle
/// transitions e^{2 pi i beta_UV} would fail to close on triple overlaps.
class IntegralityError : public std::runtime_error {
public:
    IntegralityError(std::string what, std::vector<int> offenders)
        : std::runtime_error(std::move(what)), offending_triples(std::move(offenders)) {}
    std::vector<int> offending_triples;
};

/// Principal circle bundle over the box quotient, with fiber coordinate s of
/// period 1 and additive fiber transitions s_U = s_V + beta_UV mod 1. Kept
/// exact; the exponential transitions exist only in the numeric audit.
struct WeylBundle {
    Covering cover;
    CechData cech;
};

/// Refuses a non-integral cocycle.
WeylBundle build_bundle(Covering cover, CechData cech);
/// Skips the integrality gate; exists so the numeric audit can demonstrate
/// how a fractional cocycle breaks the triple product.
WeylBundle build_bundle_unchecked(Covering cover, CechData cech);

/// Everything the identity suite touches, on one chart of the total space
/// extended by the fiber coordinate. The gauge polynomial f (basic: x^i, p_i
/// only) realizes beta_u = k p_i dx^i + df, so A^i = df/dp_i and
/// B_i = k p_i + df/dx^i.
struct CanonicalObjects {
    ManifoldSpec spec;
    Frame frame;  // (s, x0, x1.., p1..)
    Polynomial gauge;
    DifferentialForm alpha;      // dx0 + k p_i dx^i
    DifferentialForm beta_u;     // basic potential incl. gauge
    DifferentialForm beta;       // ds + beta_u
    DifferentialForm omega;      // k dp_i ^ dx^i
    DifferentialForm theta;      // alpha - beta
    DifferentialForm big_omega;  // alpha ^ beta + omega
    VectorField E;               // d/ds
    VectorField X;               // d/dx0
    VectorField Y;               // X + E
    std::vector<Polynomial> A;   // dp_i coefficients of beta_u
    std::vector<Polynomial> B;   // dx^i coefficients of beta_u
};

Frame total_space_frame(const ManifoldSpec& spec, const std::string& chart_id);
CanonicalObjects canonical_objects(const ManifoldSpec& spec, const std::string& chart_id,
                                   const Polynomial& gauge);
CanonicalObjects canonical_objects(const WeylBundle& bundle, int chart,
                                   const Polynomial& gauge);

struct IdentityRow {
    std::string name;       // short machine id
    std::string statement;  // the identity itself, as checked
    bool pass = false;
    std::string note;       // sign annotations and similar
};

struct IdentityReport {
    std::vector<IdentityRow> rows;
    bool all_pass = true;
};

/// Evaluates every identity of the canonical-object table by exact polynomial
/// arithmetic; a row passes iff the difference is the structural zero.
IdentityReport run_identity_suite(const CanonicalObjects& objs);

class SharpSingularError : public std::runtime_error {
public:
    SharpSingularError(std::string what, int kernel)
        : std::runtime_error(std::move(what)), kernel_dimension(kernel) {}
    int kernel_dimension;
};

/// Pointwise raising operator: the unique v with (v . two_form) = gamma at
/// the point, via a dense LU solve. Throws SharpSingularError (with the
/// kernel dimension) when the 2-form is degenerate there.
Eigen::VectorXd sharp(const DifferentialForm& two_form, const DifferentialForm& gamma,
                      const std::map<std::string, double>& point);
Eigen::VectorXd sharp(const CanonicalObjects& objs, const DifferentialForm& gamma,
                      const std::map<std::string, double>& point);

/// Exact-rational route of the same solve (fraction-free Gauss elimination);
/// dual check for the floating path.
std::vector<Rational> sharp_exact(const DifferentialForm& two_form,
                                  const DifferentialForm& gamma,
                                  const std::map<std::string, Rational>& point);

/// max |a_UV a_VW a_WU - 1| over random points of random triple overlaps,
/// with every transition evaluated in its own chart's lift.
double verify_cocycle_numeric(const Covering& cover, const CechData& cech, int samples,
                              SplitMix64& rng);

}  // namespace pfw

#endif
