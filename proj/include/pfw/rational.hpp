#ifndef PFW_RATIONAL_HPP
#define PFW_RATIONAL_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

namespace pfw {

/// Exact rational on 64-bit numerator/denominator. Always reduced, denominator
/// positive. Intermediates run through 128-bit arithmetic; a reduced result
/// that no longer fits in 64 bits throws std::overflow_error.
class Rational {
public:
    Rational() = default;
    Rational(long long n) : num_(n) {}
    Rational(long long n, long long d);

    long long num() const { return num_; }
    long long den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

    Rational operator-() const { return Rational(-num_, den_); }

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);  // throws on b == 0

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b);
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    Rational abs() const { return num_ < 0 ? -*this : *this; }

    /// Largest integer <= value.
    long long floor() const;
    /// Nearest integer, ties toward +infinity.
    long long round_nearest() const;

    double to_double() const {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    /// "3", "-1/2", ...
    std::string str() const;
    /// Accepts "n" and "n/d" with optional sign.
    static Rational parse(const std::string& text);

private:
    long long num_ = 0;
    long long den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

Rational gcd_rational(const Rational& a, const Rational& b);

}  // namespace pfw

#endif
