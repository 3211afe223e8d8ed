#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>

#include "curvelab/errors.hpp"

namespace curvelab {

// Arbitrary-precision rational, always reduced, denominator > 0.
using Rat = boost::multiprecision::mpq_rational;
using Int = boost::multiprecision::mpz_int;

inline Rat rat(long n) { return Rat(n); }
inline Rat rat(long n, long d) { return Rat(n) / Rat(d); }

// Accepts "p", "-p", "p/q".
inline Rat parse_rat(const std::string& s) {
    size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
    auto digits = [&](Int& out) {
        size_t start = i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
        if (i == start) throw ParseError("not a rational: '" + s + "'");
        out = Int(s.substr(start, i - start));
    };
    Int num, den(1);
    digits(num);
    if (i < s.size() && s[i] == '/') {
        ++i;
        digits(den);
        if (den == 0) throw ParseError("zero denominator: '" + s + "'");
    }
    if (i != s.size()) throw ParseError("not a rational: '" + s + "'");
    Rat q(num, den);
    return neg ? Rat(-q) : q;
}

inline std::string to_string(const Rat& q) { return q.str(); }

// Residue of q modulo p; throws if the denominator vanishes mod p.
inline std::uint64_t rat_mod(const Rat& q, std::uint64_t p) {
    using boost::multiprecision::mpz_int;
    mpz_int num = numerator(q);
    mpz_int den = denominator(q);
    mpz_int pp(p);
    mpz_int n = num % pp;
    if (n < 0) n += pp;
    mpz_int d = den % pp;
    if (d == 0) throw Error("prime divides a coefficient denominator");
    // Inverse via Fermat: p prime.
    mpz_int inv;
    mpz_invert(inv.backend().data(), d.backend().data(), pp.backend().data());
    mpz_int r = (n * inv) % pp;
    return static_cast<std::uint64_t>(r);
}

} // namespace curvelab
