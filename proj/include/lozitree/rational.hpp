#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

#include "lozitree/errors.hpp"

namespace lozitree {

// Arbitrary-precision integers and canonical rationals. cpp_rational keeps
// gcd-reduced form with positive denominator, which is exactly the invariant
// the exact kernel needs.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline int sign_of(const Rational& r) {
    if (r > 0) return 1;
    if (r < 0) return -1;
    return 0;
}

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

// "p/q" with the "/1" suppressed for integers.
inline std::string to_string(const Rational& r) {
    BigInt num = numerator(r);
    BigInt den = denominator(r);
    std::string s = num.str();
    if (den != 1) {
        s += "/";
        s += den.str();
    }
    return s;
}

inline std::optional<Rational> try_parse_rational(std::string_view text) {
    auto is_int = [](std::string_view v) {
        if (!v.empty() && (v.front() == '-' || v.front() == '+')) v.remove_prefix(1);
        if (v.empty()) return false;
        for (char c : v)
            if (c < '0' || c > '9') return false;
        return true;
    };
    auto slash = text.find('/');
    try {
        if (slash == std::string_view::npos) {
            if (!is_int(text)) return std::nullopt;
            return Rational(BigInt(std::string(text)));
        }
        std::string_view num = text.substr(0, slash);
        std::string_view den = text.substr(slash + 1);
        if (!is_int(num) || !is_int(den)) return std::nullopt;
        BigInt d{std::string(den)};
        if (d == 0) return std::nullopt;
        return Rational(BigInt(std::string(num)), d);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

inline Rational parse_rational(std::string_view text) {
    auto r = try_parse_rational(text);
    if (!r) throw UsageError("cannot parse rational: '" + std::string(text) + "'");
    return *r;
}

// If r is the square of a rational, returns that (non-negative) square root.
inline std::optional<Rational> rational_sqrt(const Rational& r) {
    if (r < 0) return std::nullopt;
    BigInt num = numerator(r);
    BigInt den = denominator(r);
    BigInt sn = boost::multiprecision::sqrt(num);
    BigInt sd = boost::multiprecision::sqrt(den);
    if (sn * sn != num || sd * sd != den) return std::nullopt;
    return Rational(sn, sd);
}

}  // namespace lozitree
