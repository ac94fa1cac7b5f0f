#ifndef PFW_POLYNOMIAL_HPP
#define PFW_POLYNOMIAL_HPP

#include <map>
#include <string>
#include <vector>

#include "pfw/rational.hpp"

namespace pfw {

/// Affine expression c0 + sum_i c_i * var_i with exact coefficients. Affine
/// substitutions are the only substitutions the ring accepts; anything
/// non-affine is unrepresentable here by construction.
struct AffineExpr {
    Rational constant;
    std::map<std::string, Rational> linear;

    static AffineExpr constant_expr(const Rational& c) { return {c, {}}; }
    static AffineExpr var(const std::string& name) {
        return {Rational(0), {{name, Rational(1)}}};
    }
    /// name + shift
    static AffineExpr shifted_var(const std::string& name, const Rational& shift) {
        return {shift, {{name, Rational(1)}}};
    }
};

/// Map from variable name to its replacement.
using AffineSubstitution = std::map<std::string, AffineExpr>;

/// Multivariate polynomial over the rationals.
///
/// Variables are kept sorted and deduplicated; terms live in a graded-lex
/// ordered map keyed by exponent tuples; zero coefficients are never stored.
/// Operations on polynomials with different variable lists align them on the
/// union first, so equality is semantic as well as structural.
class Polynomial {
public:
    using Exponents = std::vector<int>;

    struct GradedLex {
        bool operator()(const Exponents& a, const Exponents& b) const;
    };
    using TermMap = std::map<Exponents, Rational, GradedLex>;

    Polynomial() = default;  // zero

    static Polynomial constant(const Rational& c);
    static Polynomial variable(const std::string& name);
    /// Terms given as (exponents, coefficient) against the provided variables;
    /// variables are sorted internally, exponents are remapped accordingly.
    static Polynomial from_terms(const std::vector<std::string>& vars,
                                 const std::vector<std::pair<Exponents, Rational>>& terms);

    const std::vector<std::string>& variables() const { return vars_; }
    const TermMap& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    /// Value of a degree-0 polynomial (zero polynomial gives 0); throws otherwise.
    Rational constant_value() const;
    int total_degree() const;  // -1 for the zero polynomial
    int degree_in(const std::string& var) const;

    Polynomial operator-() const;
    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Rational& c, const Polynomial& p);
    friend Polynomial operator*(const Polynomial& p, const Rational& c) { return c * p; }
    Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
    Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    friend bool operator==(const Polynomial& a, const Polynomial& b);
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

    /// Formal partial derivative; the variable must be present.
    Polynomial derivative(const std::string& var) const;
    /// Zero when the variable does not occur (used by the exterior calculus).
    Polynomial derivative_or_zero(const std::string& var) const;
    /// Formal antiderivative in var with zero constant term.
    Polynomial antiderivative(const std::string& var) const;

    /// Exact composition with an affine substitution. Every variable of this
    /// polynomial must be covered by the map.
    Polynomial substitute(const AffineSubstitution& sub) const;

    /// Floating-point evaluation; every variable must have a value.
    double evaluate(const std::map<std::string, double>& point) const;
    /// Exact evaluation at a rational point.
    Rational evaluate_exact(const std::map<std::string, Rational>& point) const;

    std::string str() const;

private:
    std::vector<std::string> vars_;
    TermMap terms_;

    void insert_term(const Exponents& e, const Rational& c);
    Polynomial with_variables(const std::vector<std::string>& target_vars) const;
    static void align(const Polynomial& a, const Polynomial& b, Polynomial& aa, Polynomial& bb);
};

Polynomial pow(const Polynomial& p, int exponent);

}  // namespace pfw

#endif
