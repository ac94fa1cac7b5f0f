#include "pfw/polynomial.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pfw {

bool Polynomial::GradedLex::operator()(const Exponents& a, const Exponents& b) const {
    int da = std::accumulate(a.begin(), a.end(), 0);
    int db = std::accumulate(b.begin(), b.end(), 0);
    if (da != db) return da < db;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Polynomial Polynomial::constant(const Rational& c) {
    Polynomial p;
    if (!c.is_zero()) p.terms_[{}] = c;
    return p;
}

Polynomial Polynomial::variable(const std::string& name) {
    Polynomial p;
    p.vars_ = {name};
    p.terms_[{1}] = Rational(1);
    return p;
}

Polynomial Polynomial::from_terms(const std::vector<std::string>& vars,
                                  const std::vector<std::pair<Exponents, Rational>>& terms) {
    std::vector<std::string> sorted = vars;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.size() != vars.size())
        throw std::invalid_argument("duplicate variable in polynomial");

    // map original positions to sorted positions
    std::vector<int> where(vars.size());
    for (size_t i = 0; i < vars.size(); ++i) {
        where[i] = static_cast<int>(
            std::lower_bound(sorted.begin(), sorted.end(), vars[i]) - sorted.begin());
    }

    Polynomial p;
    p.vars_ = sorted;
    for (const auto& [e, c] : terms) {
        if (e.size() != vars.size())
            throw std::invalid_argument("exponent tuple length mismatch");
        Exponents remapped(sorted.size(), 0);
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] < 0) throw std::invalid_argument("negative exponent");
            remapped[where[i]] += e[i];
        }
        p.insert_term(remapped, c);
    }
    return p;
}

void Polynomial::insert_term(const Exponents& e, const Rational& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

bool Polynomial::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first ==
                                                        Exponents(vars_.size(), 0));
}

Rational Polynomial::constant_value() const {
    if (terms_.empty()) return Rational(0);
    if (!is_constant()) throw std::logic_error("polynomial is not constant");
    return terms_.begin()->second;
}

int Polynomial::total_degree() const {
    if (terms_.empty()) return -1;
    const Exponents& top = terms_.rbegin()->first;  // graded order: last is max degree
    return std::accumulate(top.begin(), top.end(), 0);
}

int Polynomial::degree_in(const std::string& var) const {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
    if (it == vars_.end() || *it != var) return 0;
    size_t idx = static_cast<size_t>(it - vars_.begin());
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[idx]);
    return d;
}

Polynomial Polynomial::with_variables(const std::vector<std::string>& target_vars) const {
    std::vector<int> where(vars_.size());
    for (size_t i = 0; i < vars_.size(); ++i) {
        auto it = std::lower_bound(target_vars.begin(), target_vars.end(), vars_[i]);
        if (it == target_vars.end() || *it != vars_[i])
            throw std::logic_error("variable alignment lost a symbol");
        where[i] = static_cast<int>(it - target_vars.begin());
    }
    Polynomial out;
    out.vars_ = target_vars;
    for (const auto& [e, c] : terms_) {
        Exponents remapped(target_vars.size(), 0);
        for (size_t i = 0; i < e.size(); ++i) remapped[where[i]] = e[i];
        out.terms_.emplace(std::move(remapped), c);
    }
    return out;
}

void Polynomial::align(const Polynomial& a, const Polynomial& b, Polynomial& aa,
                       Polynomial& bb) {
    if (a.vars_ == b.vars_) {
        aa = a;
        bb = b;
        return;
    }
    std::vector<std::string> joint;
    std::set_union(a.vars_.begin(), a.vars_.end(), b.vars_.begin(), b.vars_.end(),
                   std::back_inserter(joint));
    aa = a.with_variables(joint);
    bb = b.with_variables(joint);
}

Polynomial Polynomial::operator-() const {
    Polynomial out;
    out.vars_ = vars_;
    for (const auto& [e, c] : terms_) out.terms_.emplace(e, -c);
    return out;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    Polynomial aa, bb;
    Polynomial::align(a, b, aa, bb);
    for (const auto& [e, c] : bb.terms_) aa.insert_term(e, c);
    return aa;
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    Polynomial aa, bb;
    Polynomial::align(a, b, aa, bb);
    for (const auto& [e, c] : bb.terms_) aa.insert_term(e, -c);
    return aa;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial aa, bb;
    Polynomial::align(a, b, aa, bb);
    Polynomial out;
    out.vars_ = aa.vars_;
    for (const auto& [ea, ca] : aa.terms_) {
        for (const auto& [eb, cb] : bb.terms_) {
            Polynomial::Exponents e(ea.size());
            for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            out.insert_term(e, ca * cb);
        }
    }
    return out;
}

Polynomial operator*(const Rational& c, const Polynomial& p) {
    if (c.is_zero()) return Polynomial();
    Polynomial out;
    out.vars_ = p.vars_;
    for (const auto& [e, pc] : p.terms_) out.terms_.emplace(e, c * pc);
    return out;
}

bool operator==(const Polynomial& a, const Polynomial& b) {
    Polynomial aa, bb;
    Polynomial::align(a, b, aa, bb);
    return aa.terms_ == bb.terms_;
}

Polynomial Polynomial::derivative(const std::string& var) const {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
    if (it == vars_.end() || *it != var)
        throw std::invalid_argument("unknown variable '" + var + "' in derivative");
    return derivative_or_zero(var);
}

Polynomial Polynomial::derivative_or_zero(const std::string& var) const {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
    if (it == vars_.end() || *it != var) return Polynomial();
    size_t idx = static_cast<size_t>(it - vars_.begin());
    Polynomial out;
    out.vars_ = vars_;
    for (const auto& [e, c] : terms_) {
        if (e[idx] == 0) continue;
        Exponents d = e;
        --d[idx];
        out.insert_term(d, c * Rational(e[idx]));
    }
    return out;
}

Polynomial Polynomial::antiderivative(const std::string& var) const {
    Polynomial base = *this;
    auto it = std::lower_bound(base.vars_.begin(), base.vars_.end(), var);
    if (it == base.vars_.end() || *it != var) {
        std::vector<std::string> joint = base.vars_;
        joint.insert(std::lower_bound(joint.begin(), joint.end(), var), var);
        base = base.with_variables(joint);
        it = std::lower_bound(base.vars_.begin(), base.vars_.end(), var);
    }
    size_t idx = static_cast<size_t>(it - base.vars_.begin());
    Polynomial out;
    out.vars_ = base.vars_;
    for (const auto& [e, c] : base.terms_) {
        Exponents a = e;
        ++a[idx];
        out.insert_term(a, c / Rational(a[idx]));
    }
    return out;
}

Polynomial Polynomial::substitute(const AffineSubstitution& sub) const {
    for (const auto& v : vars_) {
        if (sub.find(v) == sub.end())
            throw std::invalid_argument("substitution does not cover variable '" + v + "'");
    }

    // replacement polynomials, one per original variable
    std::vector<Polynomial> repl;
    repl.reserve(vars_.size());
    for (const auto& v : vars_) {
        const AffineExpr& e = sub.at(v);
        Polynomial r = Polynomial::constant(e.constant);
        for (const auto& [name, coeff] : e.linear)
            r += coeff * Polynomial::variable(name);
        repl.push_back(std::move(r));
    }

    Polynomial out;
    for (const auto& [e, c] : terms_) {
        Polynomial term = Polynomial::constant(c);
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] > 0) term *= pow(repl[i], e[i]);
        }
        out += term;
    }
    return out;
}

double Polynomial::evaluate(const std::map<std::string, double>& point) const {
    std::vector<double> vals(vars_.size());
    for (size_t i = 0; i < vars_.size(); ++i) {
        auto it = point.find(vars_[i]);
        if (it == point.end())
            throw std::invalid_argument("missing coordinate '" + vars_[i] + "' in evaluation");
        vals[i] = it->second;
    }
    double acc = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c.to_double();
        for (size_t i = 0; i < e.size(); ++i) {
            for (int k = 0; k < e[i]; ++k) t *= vals[i];
        }
        acc += t;
    }
    return acc;
}

Rational Polynomial::evaluate_exact(const std::map<std::string, Rational>& point) const {
    std::vector<Rational> vals(vars_.size());
    for (size_t i = 0; i < vars_.size(); ++i) {
        auto it = point.find(vars_[i]);
        if (it == point.end())
            throw std::invalid_argument("missing coordinate '" + vars_[i] + "' in evaluation");
        vals[i] = it->second;
    }
    Rational acc(0);
    for (const auto& [e, c] : terms_) {
        Rational t = c;
        for (size_t i = 0; i < e.size(); ++i) {
            for (int k = 0; k < e[i]; ++k) t *= vals[i];
        }
        acc += t;
    }
    return acc;
}

std::string Polynomial::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // print highest-degree terms first
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        Rational mag = c.abs();
        if (first) {
            if (c.sign() < 0) os << "-";
            first = false;
        } else {
            os << (c.sign() < 0 ? " - " : " + ");
        }
        bool has_var = std::any_of(e.begin(), e.end(), [](int k) { return k > 0; });
        if (mag != Rational(1) || !has_var) os << mag.str();
        bool printed = (mag != Rational(1) || !has_var);
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (printed) os << "*";
            os << vars_[i];
            if (e[i] > 1) os << "^" << e[i];
            printed = true;
        }
    }
    return os.str();
}

Polynomial pow(const Polynomial& p, int exponent) {
    if (exponent < 0) throw std::invalid_argument("negative polynomial power");
    Polynomial out = Polynomial::constant(Rational(1));
    Polynomial base = p;
    int e = exponent;
    while (e > 0) {
        if (e & 1) out *= base;
        base *= base;
        e >>= 1;
    }
    return out;
}

}  // namespace pfw
