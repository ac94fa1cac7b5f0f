#include "pfw/forms.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace pfw {

namespace {

/// Insertion-sorts the tuple, counting swaps. Returns false for duplicates.
bool canonicalize(std::vector<int>& idx, int& sign) {
    sign = 1;
    for (size_t i = 1; i < idx.size(); ++i) {
        int v = idx[i];
        size_t j = i;
        while (j > 0 && idx[j - 1] > v) {
            idx[j] = idx[j - 1];
            --j;
            sign = -sign;
        }
        idx[j] = v;
    }
    for (size_t i = 1; i < idx.size(); ++i) {
        if (idx[i] == idx[i - 1]) return false;
    }
    return true;
}

}  // namespace

int Frame::index_of(const std::string& name) const {
    for (size_t i = 0; i < coords.size(); ++i) {
        if (coords[i] == name) return static_cast<int>(i);
    }
    throw std::invalid_argument("coordinate '" + name + "' not in chart " + chart);
}

DifferentialForm::DifferentialForm(Frame frame, int degree)
    : frame_(std::move(frame)), degree_(degree) {
    if (degree < 0) throw std::invalid_argument("negative form degree");
}

DifferentialForm DifferentialForm::function(const Frame& frame, const Polynomial& f) {
    DifferentialForm a(frame, 0);
    if (!f.is_zero()) a.comps_[{}] = f;
    return a;
}

DifferentialForm DifferentialForm::coordinate_differential(const Frame& frame,
                                                           const std::string& coord) {
    DifferentialForm a(frame, 1);
    a.comps_[{frame.index_of(coord)}] = Polynomial::constant(Rational(1));
    return a;
}

Polynomial DifferentialForm::component(const IndexTuple& sorted_indices) const {
    auto it = comps_.find(sorted_indices);
    return it == comps_.end() ? Polynomial() : it->second;
}

Polynomial DifferentialForm::component_named(const std::vector<std::string>& coords) const {
    IndexTuple idx;
    idx.reserve(coords.size());
    for (const auto& c : coords) idx.push_back(frame_.index_of(c));
    int sign = 1;
    if (!canonicalize(idx, sign)) return Polynomial();
    Polynomial p = component(idx);
    return sign < 0 ? -p : p;
}

void DifferentialForm::add_term(const IndexTuple& indices, const Polynomial& coeff) {
    if (static_cast<int>(indices.size()) != degree_)
        throw std::invalid_argument("index tuple length does not match form degree");
    if (coeff.is_zero()) return;
    for (int i : indices) {
        if (i < 0 || i >= frame_.dimension())
            throw std::invalid_argument("coordinate index out of range");
    }
    IndexTuple idx = indices;
    int sign = 1;
    if (!canonicalize(idx, sign)) return;
    Polynomial add = sign < 0 ? -coeff : coeff;
    auto it = comps_.find(idx);
    if (it == comps_.end()) {
        comps_.emplace(std::move(idx), std::move(add));
    } else {
        it->second += add;
        if (it->second.is_zero()) comps_.erase(it);
    }
}

void DifferentialForm::check_same_shape(const DifferentialForm& other) const {
    if (!(frame_ == other.frame_))
        throw std::invalid_argument("forms live on different charts");
    if (degree_ != other.degree_)
        throw std::invalid_argument("forms have different degrees");
}

DifferentialForm DifferentialForm::operator-() const {
    DifferentialForm out(frame_, degree_);
    for (const auto& [k, p] : comps_) out.comps_.emplace(k, -p);
    return out;
}

DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b) {
    a.check_same_shape(b);
    DifferentialForm out = a;
    for (const auto& [k, p] : b.comps_) {
        auto it = out.comps_.find(k);
        if (it == out.comps_.end()) {
            out.comps_.emplace(k, p);
        } else {
            it->second += p;
            if (it->second.is_zero()) out.comps_.erase(it);
        }
    }
    return out;
}

DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b) {
    return a + (-b);
}

DifferentialForm operator*(const Polynomial& f, const DifferentialForm& a) {
    DifferentialForm out(a.frame_, a.degree_);
    if (f.is_zero()) return out;
    for (const auto& [k, p] : a.comps_) {
        Polynomial q = f * p;
        if (!q.is_zero()) out.comps_.emplace(k, std::move(q));
    }
    return out;
}

DifferentialForm operator*(const Rational& c, const DifferentialForm& a) {
    return Polynomial::constant(c) * a;
}

bool operator==(const DifferentialForm& a, const DifferentialForm& b) {
    return a.frame_ == b.frame_ && a.degree_ == b.degree_ && a.comps_ == b.comps_;
}

std::string DifferentialForm::str() const {
    if (comps_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, p] : comps_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << p.str() << ")";
        for (int i : k) os << " d" << frame_.coords[i];
    }
    return os.str();
}

VectorField VectorField::coordinate(const Frame& frame, const std::string& coord) {
    VectorField v(frame);
    v.set_component(coord, Polynomial::constant(Rational(1)));
    return v;
}

Polynomial VectorField::component(const std::string& coord) const {
    auto it = comps_.find(coord);
    return it == comps_.end() ? Polynomial() : it->second;
}

void VectorField::set_component(const std::string& coord, const Polynomial& p) {
    frame_.index_of(coord);  // validates
    if (p.is_zero()) {
        comps_.erase(coord);
    } else {
        comps_[coord] = p;
    }
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    if (!(a.frame_ == b.frame_))
        throw std::invalid_argument("vector fields live on different charts");
    VectorField out = a;
    for (const auto& [c, p] : b.comps_) out.set_component(c, out.component(c) + p);
    return out;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    if (!(a.frame_ == b.frame_))
        throw std::invalid_argument("vector fields live on different charts");
    VectorField out = a;
    for (const auto& [c, p] : b.comps_) out.set_component(c, out.component(c) - p);
    return out;
}

VectorField operator*(const Polynomial& f, const VectorField& v) {
    VectorField out(v.frame_);
    for (const auto& [c, p] : v.comps_) out.set_component(c, f * p);
    return out;
}

bool operator==(const VectorField& a, const VectorField& b) {
    return a.frame_ == b.frame_ && a.comps_ == b.comps_;
}

std::string VectorField::str() const {
    if (comps_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [c, p] : comps_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << p.str() << ") d/d" << c;
    }
    return os.str();
}

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
    if (!(a.frame() == b.frame()))
        throw std::invalid_argument("wedge of forms on different charts");
    int deg = a.degree() + b.degree();
    DifferentialForm out(a.frame(), deg);
    if (deg > a.frame().dimension()) return out;  // vanishes, not an error
    for (const auto& [ka, pa] : a.components()) {
        for (const auto& [kb, pb] : b.components()) {
            DifferentialForm::IndexTuple k = ka;
            k.insert(k.end(), kb.begin(), kb.end());
            out.add_term(k, pa * pb);
        }
    }
    return out;
}

DifferentialForm exterior_derivative(const DifferentialForm& a) {
    const Frame& fr = a.frame();
    DifferentialForm out(fr, a.degree() + 1);
    if (a.degree() + 1 > fr.dimension()) return out;
    for (const auto& [k, p] : a.components()) {
        for (int c = 0; c < fr.dimension(); ++c) {
            Polynomial dp = p.derivative_or_zero(fr.coords[c]);
            if (dp.is_zero()) continue;
            DifferentialForm::IndexTuple idx;
            idx.reserve(k.size() + 1);
            idx.push_back(c);
            idx.insert(idx.end(), k.begin(), k.end());
            out.add_term(idx, dp);
        }
    }
    return out;
}

DifferentialForm interior_product(const VectorField& v, const DifferentialForm& a) {
    if (!(v.frame() == a.frame()))
        throw std::invalid_argument("contraction across different charts");
    if (a.degree() == 0) return DifferentialForm(a.frame(), 0);
    DifferentialForm out(a.frame(), a.degree() - 1);
    for (const auto& [k, p] : a.components()) {
        for (size_t j = 0; j < k.size(); ++j) {
            Polynomial vc = v.component(a.frame().coords[k[j]]);
            if (vc.is_zero()) continue;
            DifferentialForm::IndexTuple rest;
            rest.reserve(k.size() - 1);
            for (size_t m = 0; m < k.size(); ++m) {
                if (m != j) rest.push_back(k[m]);
            }
            Polynomial coeff = vc * p;
            if (j % 2 == 1) coeff = -coeff;
            out.add_term(rest, coeff);
        }
    }
    return out;
}

DifferentialForm lie_derivative(const VectorField& v, const DifferentialForm& a) {
    DifferentialForm transport = interior_product(v, exterior_derivative(a));
    if (a.degree() == 0) return transport;  // i_v a vanishes identically
    return transport + exterior_derivative(interior_product(v, a));
}

DifferentialForm lie_derivative_direct(const VectorField& v, const DifferentialForm& a) {
    if (!(v.frame() == a.frame()))
        throw std::invalid_argument("Lie derivative across different charts");
    const Frame& fr = a.frame();
    DifferentialForm out(fr, a.degree());
    for (const auto& [k, p] : a.components()) {
        // transport term v^c @_c p
        Polynomial transport;
        for (const auto& [c, vc] : v.components())
            transport += vc * p.derivative_or_zero(c);
        out.add_term(k, transport);
        // one d(v^{i_j}) insertion per slot
        for (size_t j = 0; j < k.size(); ++j) {
            Polynomial vj = v.component(fr.coords[k[j]]);
            if (vj.is_zero()) continue;
            for (int c = 0; c < fr.dimension(); ++c) {
                Polynomial dv = vj.derivative_or_zero(fr.coords[c]);
                if (dv.is_zero()) continue;
                DifferentialForm::IndexTuple idx = k;
                idx[j] = c;
                out.add_term(idx, p * dv);
            }
        }
    }
    return out;
}

VectorField lie_bracket(const VectorField& v, const VectorField& w) {
    if (!(v.frame() == w.frame()))
        throw std::invalid_argument("bracket across different charts");
    VectorField out(v.frame());
    for (const auto& coord : v.frame().coords) {
        Polynomial acc;
        for (const auto& [c, vc] : v.components())
            acc += vc * w.component(coord).derivative_or_zero(c);
        for (const auto& [c, wc] : w.components())
            acc -= wc * v.component(coord).derivative_or_zero(c);
        out.set_component(coord, acc);
    }
    return out;
}

bool is_basic(const DifferentialForm& a, const VectorField& xi) {
    return interior_product(xi, a).is_zero() && lie_derivative(xi, a).is_zero();
}

AffineChartMap AffineChartMap::identity(const Frame& frame) {
    AffineChartMap m{frame, frame, {}};
    for (const auto& c : frame.coords) m.target_exprs[c] = AffineExpr::var(c);
    return m;
}

AffineChartMap AffineChartMap::projection(const Frame& source, const Frame& target) {
    AffineChartMap m{source, target, {}};
    for (const auto& c : target.coords) {
        source.index_of(c);  // every target coordinate must exist upstairs
        m.target_exprs[c] = AffineExpr::var(c);
    }
    return m;
}

AffineChartMap AffineChartMap::translation(const Frame& source, const Frame& target,
                                           const std::map<std::string, Rational>& shifts) {
    if (source.coords != target.coords)
        throw std::invalid_argument("translation requires identical coordinate lists");
    AffineChartMap m{source, target, {}};
    for (const auto& c : target.coords) {
        auto it = shifts.find(c);
        Rational s = it == shifts.end() ? Rational(0) : it->second;
        m.target_exprs[c] = AffineExpr::shifted_var(c, s);
    }
    return m;
}

AffineChartMap compose(const AffineChartMap& outer, const AffineChartMap& inner) {
    if (!(outer.source == inner.target))
        throw std::invalid_argument("chart maps do not compose");
    AffineChartMap m{inner.source, outer.target, {}};
    for (const auto& [coord, expr] : outer.target_exprs) {
        AffineExpr composed{expr.constant, {}};
        for (const auto& [mid, coeff] : expr.linear) {
            auto it = inner.target_exprs.find(mid);
            if (it == inner.target_exprs.end())
                throw std::invalid_argument("inner map missing coordinate '" + mid + "'");
            composed.constant += coeff * it->second.constant;
            for (const auto& [src, c2] : it->second.linear) {
                composed.linear[src] += coeff * c2;
                if (composed.linear[src].is_zero()) composed.linear.erase(src);
            }
        }
        m.target_exprs[coord] = composed;
    }
    return m;
}

Polynomial pullback(const AffineChartMap& map, const Polynomial& f_on_target) {
    AffineSubstitution sub;
    for (const auto& v : f_on_target.variables()) {
        auto it = map.target_exprs.find(v);
        if (it == map.target_exprs.end())
            throw std::invalid_argument("map does not provide target coordinate '" + v + "'");
        sub[v] = it->second;
    }
    return f_on_target.substitute(sub);
}

DifferentialForm pullback(const AffineChartMap& map, const DifferentialForm& a_on_target) {
    if (!(a_on_target.frame() == map.target))
        throw std::invalid_argument("pullback: form does not live on the map's target chart");
    const Frame& src = map.source;
    DifferentialForm out(src, a_on_target.degree());

    // differentials of the target coordinates, as constant 1-forms downstairs
    std::vector<DifferentialForm> dphi;
    dphi.reserve(map.target.coords.size());
    for (const auto& c : map.target.coords) {
        DifferentialForm d(src, 1);
        const AffineExpr& e = map.target_exprs.at(c);
        for (const auto& [s, coeff] : e.linear)
            d.add_term({src.index_of(s)}, Polynomial::constant(coeff));
        dphi.push_back(std::move(d));
    }

    for (const auto& [k, p] : a_on_target.components()) {
        DifferentialForm term = DifferentialForm::function(src, pullback(map, p));
        for (int i : k) term = wedge(term, dphi[i]);
        out = out + term;
    }
    return out;
}

}  // namespace pfw
