#include "pfw/rational.hpp"

#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pfw {

namespace {

using i128 = __int128;

i128 iabs(i128 x) { return x < 0 ? -x : x; }

i128 gcd128(i128 a, i128 b) {
    a = iabs(a);
    b = iabs(b);
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

long long narrow(i128 x) {
    if (x > std::numeric_limits<long long>::max() ||
        x < std::numeric_limits<long long>::min()) {
        throw std::overflow_error("rational arithmetic overflow");
    }
    return static_cast<long long>(x);
}

Rational make_reduced(i128 n, i128 d) {
    if (d == 0) throw std::invalid_argument("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    if (n == 0) return Rational(0);
    i128 g = gcd128(n, d);
    // constructor re-reduces, trivially since gcd is now 1
    return Rational(narrow(n / g), narrow(d / g));
}

}  // namespace

Rational::Rational(long long n, long long d) {
    if (d == 0) throw std::invalid_argument("rational with zero denominator");
    i128 nn = n;
    i128 dd = d;
    if (dd < 0) {
        nn = -nn;
        dd = -dd;
    }
    if (nn == 0) {
        num_ = 0;
        den_ = 1;
        return;
    }
    i128 g = gcd128(nn, dd);
    num_ = narrow(nn / g);
    den_ = narrow(dd / g);
}

Rational operator+(const Rational& a, const Rational& b) {
    return make_reduced(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                        i128(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
    return make_reduced(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                        i128(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
    return make_reduced(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::invalid_argument("rational division by zero");
    return make_reduced(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
}

bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
}

long long Rational::floor() const {
    long long q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

long long Rational::round_nearest() const {
    // floor(x + 1/2), so exact halves round up
    return make_reduced(i128(num_) * 2 + den_, i128(den_) * 2).floor();
}

std::string Rational::str() const {
    std::ostringstream os;
    os << num_;
    if (den_ != 1) os << '/' << den_;
    return os.str();
}

Rational Rational::parse(const std::string& text) {
    std::string s = text;
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            return Rational(std::stoll(s));
        }
        long long n = std::stoll(s.substr(0, slash));
        long long d = std::stoll(s.substr(slash + 1));
        return Rational(n, d);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse rational from '" + text + "'");
    }
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
}

Rational gcd_rational(const Rational& a, const Rational& b) {
    // gcd of a*Z + b*Z: gcd of numerators over lcm of denominators
    if (a.is_zero()) return b.abs();
    if (b.is_zero()) return a.abs();
    i128 lcm = i128(a.den()) / gcd128(a.den(), b.den()) * b.den();
    i128 an = i128(a.num()) * (lcm / a.den());
    i128 bn = i128(b.num()) * (lcm / b.den());
    return make_reduced(gcd128(an, bn), lcm);
}

}  // namespace pfw
