#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace l2tor {

/// Exact rational with 64-bit numerator/denominator. Every operation
/// normalizes (gcd-reduced, positive denominator) and throws
/// std::overflow_error instead of wrapping.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n) {}
    Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

    [[nodiscard]] constexpr std::int64_t num() const noexcept { return num_; }
    [[nodiscard]] constexpr std::int64_t den() const noexcept { return den_; }
    [[nodiscard]] constexpr bool is_zero() const noexcept { return num_ == 0; }
    [[nodiscard]] constexpr bool is_integer() const noexcept { return den_ == 1; }
    [[nodiscard]] double to_double() const noexcept {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    Rational operator-() const { return from_wide(-static_cast<__int128>(num_), den_); }

    friend Rational operator+(const Rational& x, const Rational& y) {
        return from_wide(static_cast<__int128>(x.num_) * y.den_ + static_cast<__int128>(y.num_) * x.den_,
                         static_cast<__int128>(x.den_) * y.den_);
    }
    friend Rational operator-(const Rational& x, const Rational& y) { return x + (-y); }
    friend Rational operator*(const Rational& x, const Rational& y) {
        return from_wide(static_cast<__int128>(x.num_) * y.num_, static_cast<__int128>(x.den_) * y.den_);
    }
    friend Rational operator/(const Rational& x, const Rational& y) {
        if (y.num_ == 0) throw std::domain_error("rational division by zero");
        return from_wide(static_cast<__int128>(x.num_) * y.den_, static_cast<__int128>(x.den_) * y.num_);
    }
    Rational& operator+=(const Rational& y) { return *this = *this + y; }
    Rational& operator-=(const Rational& y) { return *this = *this - y; }
    Rational& operator*=(const Rational& y) { return *this = *this * y; }
    Rational& operator/=(const Rational& y) { return *this = *this / y; }

    friend constexpr bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& x, const Rational& y) {
        const __int128 lhs = static_cast<__int128>(x.num_) * y.den_;
        const __int128 rhs = static_cast<__int128>(y.num_) * x.den_;
        return lhs <=> rhs;
    }

    [[nodiscard]] std::string str() const {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Parses "p", "-p", "p/q".
    static Rational parse(std::string_view s) {
        auto to_int = [&](std::string_view part) -> std::int64_t {
            if (part.empty()) throw std::invalid_argument("malformed rational '" + std::string(s) + "'");
            std::size_t pos = 0;
            std::int64_t v = 0;
            try {
                v = std::stoll(std::string(part), &pos);
            } catch (const std::exception&) {
                throw std::invalid_argument("malformed rational '" + std::string(s) + "'");
            }
            if (pos != part.size()) throw std::invalid_argument("malformed rational '" + std::string(s) + "'");
            return v;
        };
        const auto slash = s.find('/');
        if (slash == std::string_view::npos) return Rational(to_int(s));
        const auto d = to_int(s.substr(slash + 1));
        if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(s) + "'");
        return Rational(to_int(s.substr(0, slash)), d);
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    void assign(std::int64_t n, std::int64_t d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        *this = from_wide(n, d);
    }

    static Rational from_wide(__int128 n, __int128 d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 a = n < 0 ? -n : n;
        __int128 b = d;
        while (b != 0) {
            const __int128 r = a % b;
            a = b;
            b = r;
        }
        if (a > 1) {
            n /= a;
            d /= a;
        }
        constexpr __int128 lim = std::numeric_limits<std::int64_t>::max();
        if (n > lim || n < -lim || d > lim) throw std::overflow_error("rational overflow");
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d == 0 ? 1 : d);
        return r;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline Rational abs(const Rational& r) { return r.num() < 0 ? -r : r; }

}  // namespace l2tor
