#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace jrpd {

/// Exact rational number over 64-bit integers.
///
/// Always stored reduced with a positive denominator. Intermediate products
/// are computed in 128 bits; a result that does not fit back into 64 bits
/// throws std::overflow_error instead of wrapping.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t numerator, std::int64_t denominator = 1) {
        if (denominator == 0) {
            throw std::domain_error("rational with zero denominator");
        }
        assign(numerator, denominator);
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    /// Parses "p", "p/q" or "-p/q" (surrounding whitespace not allowed).
    static Rational parse(std::string_view text) {
        auto parse_int = [&](std::string_view part) -> std::int64_t {
            if (part.empty()) {
                throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
            }
            std::size_t pos = 0;
            bool negative = false;
            if (part[0] == '-' || part[0] == '+') {
                negative = part[0] == '-';
                pos = 1;
            }
            if (pos == part.size()) {
                throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
            }
            __int128 value = 0;
            for (; pos < part.size(); ++pos) {
                char c = part[pos];
                if (c < '0' || c > '9') {
                    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
                }
                value = value * 10 + (c - '0');
                if (value > INT64_MAX) {
                    throw std::overflow_error("rational component out of range in '" +
                                              std::string(text) + "'");
                }
            }
            return static_cast<std::int64_t>(negative ? -value : value);
        };
        auto slash = text.find('/');
        if (slash == std::string_view::npos) {
            return Rational(parse_int(text));
        }
        std::int64_t d = parse_int(text.substr(slash + 1));
        if (d == 0) {
            throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        }
        return Rational(parse_int(text.substr(0, slash)), d);
    }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                         static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return from_wide(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                         static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        return from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
    }
    Rational operator-() const { return from_wide(-static_cast<__int128>(num_), den_); }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
        __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    static __int128 wide_gcd(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    static Rational from_wide(__int128 n, __int128 d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 g = wide_gcd(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        if (n > INT64_MAX || n < -INT64_MAX || d > INT64_MAX) {
            throw std::overflow_error("rational arithmetic overflow");
        }
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d);
        if (r.num_ == 0) r.den_ = 1;
        return r;
    }

    void assign(std::int64_t n, std::int64_t d) { *this = from_wide(n, d); }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace jrpd

template <>
struct std::hash<jrpd::Rational> {
    std::size_t operator()(const jrpd::Rational& r) const noexcept {
        return std::hash<std::int64_t>{}(r.num()) * 31u + std::hash<std::int64_t>{}(r.den());
    }
};
