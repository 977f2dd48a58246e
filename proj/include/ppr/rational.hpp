#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>

#include "ppr/errors.hpp"

namespace ppr {

using Int = long long;

namespace detail {

using Wide = __int128;

inline Wide wide_abs(Wide x) { return x < 0 ? -x : x; }

inline Wide wide_gcd(Wide a, Wide b) {
    a = wide_abs(a);
    b = wide_abs(b);
    while (b != 0) {
        Wide t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline Int narrow(Wide x, const char* what) {
    if (x > Wide(INT64_MAX) || x < -Wide(INT64_MAX)) {
        fail("overflow", std::string("64-bit overflow in ") + what);
    }
    return static_cast<Int>(x);
}

}  // namespace detail

// Exact rational number on 64-bit numerator/denominator. The denominator is
// always positive and gcd(|num|, den) == 1. Intermediate products use
// 128-bit arithmetic; results that do not fit back into 64 bits throw
// Error("overflow", ...).
class Rational {
public:
    Rational() = default;
    Rational(Int n) : num_(n) {}  // NOLINT: implicit by design
    Rational(Int n, Int d) {
        if (d == 0) fail("overflow", "rational with zero denominator");
        *this = make(n, d);
    }

    Int num() const { return num_; }
    Int den() const { return den_; }
    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }
    int sign() const { return num_ < 0 ? -1 : (num_ > 0 ? 1 : 0); }

    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        detail::Wide n = detail::Wide(a.num_) * b.den_ + detail::Wide(b.num_) * a.den_;
        detail::Wide d = detail::Wide(a.den_) * b.den_;
        return make_wide(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return make_wide(detail::Wide(a.num_) * b.num_, detail::Wide(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) fail("overflow", "rational division by zero");
        return make_wide(detail::Wide(a.num_) * b.den_, detail::Wide(a.den_) * b.num_);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return detail::Wide(a.num_) * b.den_ < detail::Wide(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    Rational abs() const { return num_ < 0 ? -*this : *this; }

    std::string to_string() const {
        std::string s = std::to_string(num_);
        if (den_ != 1) s += "/" + std::to_string(den_);
        return s;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
        return os << r.to_string();
    }

private:
    static Rational make(Int n, Int d) { return make_wide(n, d); }

    static Rational make_wide(detail::Wide n, detail::Wide d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        detail::Wide g = detail::wide_gcd(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        Rational r;
        r.num_ = detail::narrow(n, "rational numerator");
        r.den_ = d == 0 ? 1 : detail::narrow(d, "rational denominator");
        if (r.den_ == 0) fail("overflow", "rational with zero denominator");
        return r;
    }

    Int num_ = 0;
    Int den_ = 1;
};

inline Rational abs(const Rational& r) { return r.abs(); }

}  // namespace ppr
