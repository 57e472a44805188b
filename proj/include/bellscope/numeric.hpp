#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace bellscope {

using Integer = mpz_class;
using Rational = mpq_class;
using RationalVector = std::vector<Rational>;
using IntegerVector = std::vector<Integer>;

inline Rational make_rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational parse_rational(const std::string &num, const std::string &den) {
    Rational r;
    try {
        r.get_num() = Integer(num, 10);
        r.get_den() = Integer(den, 10);
    } catch (const std::invalid_argument &) {
        throw ParseError("malformed rational " + num + "/" + den);
    }
    if (r.get_den() == 0)
        throw ParseError("zero denominator in " + num + "/" + den);
    r.canonicalize();
    return r;
}

/// Parses "p", "p/q" or a plain decimal integer.
inline Rational parse_rational(const std::string &text) {
    auto slash = text.find('/');
    if (slash == std::string::npos)
        return parse_rational(text, "1");
    return parse_rational(text.substr(0, slash), text.substr(slash + 1));
}

inline std::string to_string(const Rational &r) { return r.get_str(10); }

inline bool is_zero(std::span<const Rational> v) {
    return std::all_of(v.begin(), v.end(), [](const Rational &x) { return sgn(x) == 0; });
}

inline Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
    if (a.size() != b.size())
        throw DimensionMismatchError("dot product of vectors with lengths " +
                                     std::to_string(a.size()) + " and " + std::to_string(b.size()));
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (sgn(a[i]) != 0 && sgn(b[i]) != 0)
            s += a[i] * b[i];
    return s;
}

inline Integer dot(std::span<const Integer> a, std::span<const Integer> b) {
    Integer s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (sgn(a[i]) != 0 && sgn(b[i]) != 0)
            s += a[i] * b[i];
    return s;
}

/// The positive rational `scale` such that `scale * v` is an integer vector
/// whose entries have gcd 1. The zero vector gets scale 1.
inline Rational primitive_scale(std::span<const Rational> v) {
    Integer den_lcm = 1;
    for (const auto &x : v)
        if (sgn(x) != 0)
            mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), x.get_den().get_mpz_t());
    Integer num_gcd = 0;
    for (const auto &x : v) {
        if (sgn(x) == 0)
            continue;
        Integer n = x.get_num() * (den_lcm / x.get_den());
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), n.get_mpz_t());
    }
    if (num_gcd == 0)
        return 1;
    Rational s(den_lcm, num_gcd);
    s.canonicalize();
    return s;
}

inline IntegerVector to_primitive_integers(std::span<const Rational> v) {
    Rational s = primitive_scale(v);
    IntegerVector out;
    out.reserve(v.size());
    for (const auto &x : v) {
        Rational y = x * s;
        out.push_back(y.get_num());
    }
    return out;
}

/// Divides an integer vector in place by the gcd of its entries.
inline void make_primitive(IntegerVector &v) {
    Integer g = 0;
    for (const auto &x : v) {
        if (sgn(x) == 0)
            continue;
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g == 1)
            return;
    }
    if (g == 0 || g == 1)
        return;
    for (auto &x : v)
        mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fractions). Used only to display floating-point quantities.
inline Rational rationalize(double x, long max_den = 1000000) {
    if (!std::isfinite(x))
        throw PreconditionError("cannot rationalize a non-finite value");
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = x;
    for (int iter = 0; iter < 64; ++iter) {
        double a = std::floor(frac);
        long ai = static_cast<long>(a);
        long p2 = ai * p1 + p0;
        long q2 = ai * q1 + q0;
        if (q2 > max_den)
            break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        double rest = frac - a;
        if (rest < 1e-15 || std::abs(static_cast<double>(p1) / q1 - x) < 1e-15)
            break;
        frac = 1.0 / rest;
    }
    return make_rational(p1, q1);
}

inline double to_double(const Rational &r) { return r.get_d(); }

} // namespace bellscope
