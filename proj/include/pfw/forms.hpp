#ifndef PFW_FORMS_HPP
#define PFW_FORMS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pfw/polynomial.hpp"

namespace pfw {

/// A chart's coordinate frame: an id plus the ordered coordinate list that
/// fixes the orientation conventions of all antisymmetric index tuples.
struct Frame {
    std::string chart;
    std::vector<std::string> coords;

    int dimension() const { return static_cast<int>(coords.size()); }
    int index_of(const std::string& name) const;  // throws on unknown coordinate

    friend bool operator==(const Frame& a, const Frame& b) = default;
};

/// Differential form of fixed degree on a chart. Components are stored
/// against strictly increasing coordinate index tuples with nonzero
/// polynomial coefficients; add_term canonicalizes arbitrary index order
/// with the correct antisymmetric sign.
class DifferentialForm {
public:
    using IndexTuple = std::vector<int>;

    DifferentialForm(Frame frame, int degree);

    static DifferentialForm function(const Frame& frame, const Polynomial& f);
    static DifferentialForm coordinate_differential(const Frame& frame,
                                                    const std::string& coord);

    const Frame& frame() const { return frame_; }
    int degree() const { return degree_; }
    bool is_zero() const { return comps_.empty(); }
    const std::map<IndexTuple, Polynomial>& components() const { return comps_; }

    /// Component for a strictly increasing tuple; zero polynomial if absent.
    Polynomial component(const IndexTuple& sorted_indices) const;
    /// Convenience lookup by coordinate names (any order, sign handled).
    Polynomial component_named(const std::vector<std::string>& coords) const;

    /// Adds coeff * dz^{i1} ^ ... ^ dz^{ik} for indices in any order;
    /// duplicate indices contribute nothing.
    void add_term(const IndexTuple& indices, const Polynomial& coeff);

    DifferentialForm operator-() const;
    friend DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b);
    friend DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b);
    friend DifferentialForm operator*(const Polynomial& f, const DifferentialForm& a);
    friend DifferentialForm operator*(const Rational& c, const DifferentialForm& a);
    friend bool operator==(const DifferentialForm& a, const DifferentialForm& b);
    friend bool operator!=(const DifferentialForm& a, const DifferentialForm& b) {
        return !(a == b);
    }

    std::string str() const;

private:
    Frame frame_;
    int degree_;
    std::map<IndexTuple, Polynomial> comps_;

    void check_same_shape(const DifferentialForm& other) const;
};

/// Polynomial vector field on a chart.
class VectorField {
public:
    explicit VectorField(Frame frame) : frame_(std::move(frame)) {}

    static VectorField coordinate(const Frame& frame, const std::string& coord);

    const Frame& frame() const { return frame_; }
    const std::map<std::string, Polynomial>& components() const { return comps_; }
    Polynomial component(const std::string& coord) const;
    void set_component(const std::string& coord, const Polynomial& p);

    friend VectorField operator+(const VectorField& a, const VectorField& b);
    friend VectorField operator-(const VectorField& a, const VectorField& b);
    friend VectorField operator*(const Polynomial& f, const VectorField& v);
    friend bool operator==(const VectorField& a, const VectorField& b);

    bool is_zero() const { return comps_.empty(); }
    std::string str() const;

private:
    Frame frame_;
    std::map<std::string, Polynomial> comps_;
};

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);
DifferentialForm exterior_derivative(const DifferentialForm& a);
DifferentialForm interior_product(const VectorField& v, const DifferentialForm& a);
/// Cartan formula: L_v = i_v d + d i_v.
DifferentialForm lie_derivative(const VectorField& v, const DifferentialForm& a);
/// Coordinate formula: transport of components plus d(v^i) insertions.
/// Must agree with the Cartan route exactly.
DifferentialForm lie_derivative_direct(const VectorField& v, const DifferentialForm& a);
VectorField lie_bracket(const VectorField& v, const VectorField& w);

/// i_xi a == 0 and L_xi a == 0, both structurally.
bool is_basic(const DifferentialForm& a, const VectorField& xi);

/// Affine map between charts, phi: source -> target, given by one affine
/// expression (in source coordinates) per target coordinate. Pullback moves
/// forms from the target chart to the source chart.
struct AffineChartMap {
    Frame source;
    Frame target;
    std::map<std::string, AffineExpr> target_exprs;

    static AffineChartMap identity(const Frame& frame);
    /// Projection that forgets source coordinates absent from the target
    /// (e.g. the bundle projection dropping the fiber coordinate).
    static AffineChartMap projection(const Frame& source, const Frame& target);
    /// Pure translation on a shared coordinate list.
    static AffineChartMap translation(const Frame& source, const Frame& target,
                                      const std::map<std::string, Rational>& shifts);
};

/// outer . inner (apply inner first).
AffineChartMap compose(const AffineChartMap& outer, const AffineChartMap& inner);
Polynomial pullback(const AffineChartMap& map, const Polynomial& f_on_target);
DifferentialForm pullback(const AffineChartMap& map, const DifferentialForm& a_on_target);

}  // namespace pfw

#endif
