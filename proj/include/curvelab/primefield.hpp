#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "curvelab/errors.hpp"
#include "curvelab/rational.hpp"

namespace curvelab {

namespace detail {

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

inline std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, p);
        a = mulmod_u64(a, a, p);
        e >>= 1;
    }
    return r;
}

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

} // namespace detail

// Field object passed alongside raw uint64_t residues.
struct PrimeField {
    using Elt = std::uint64_t;
    std::uint64_t p = 0;

    Elt zero() const { return 0; }
    Elt one() const { return 1; }
    bool is_zero(Elt a) const { return a == 0; }
    Elt add(Elt a, Elt b) const {
        Elt s = a + b;
        if (s >= p || s < a) s -= p;
        return s;
    }
    Elt sub(Elt a, Elt b) const { return a >= b ? a - b : a + (p - b); }
    Elt neg(Elt a) const { return a ? p - a : 0; }
    Elt mul(Elt a, Elt b) const { return detail::mulmod_u64(a, b, p); }
    Elt inv(Elt a) const {
        if (a == 0) throw Error("inverse of zero residue");
        return detail::powmod_u64(a, p - 2, p);
    }
    Elt div(Elt a, Elt b) const { return mul(a, inv(b)); }
    Elt from_rat(const Rat& q) const { return rat_mod(q, p); }
    Elt from_long(long v) const {
        long long m = static_cast<long long>(v % static_cast<long long>(p));
        if (m < 0) m += static_cast<long long>(p);
        return static_cast<Elt>(m);
    }
};

// Field object for exact rational arithmetic, same interface as PrimeField.
struct RatField {
    using Elt = Rat;
    Rat zero() const { return Rat(0); }
    Rat one() const { return Rat(1); }
    bool is_zero(const Rat& a) const { return a == 0; }
    Rat add(const Rat& a, const Rat& b) const { return a + b; }
    Rat sub(const Rat& a, const Rat& b) const { return a - b; }
    Rat neg(const Rat& a) const { return -a; }
    Rat mul(const Rat& a, const Rat& b) const { return a * b; }
    Rat inv(const Rat& a) const {
        if (a == 0) throw Error("inverse of zero");
        return Rat(1) / a;
    }
    Rat div(const Rat& a, const Rat& b) const { return a / b; }
    Rat from_rat(const Rat& q) const { return q; }
    Rat from_long(long v) const { return Rat(v); }
};

// Draws a random prime with the given bit length from the generator.
inline std::uint64_t random_prime(std::mt19937_64& rng, unsigned bits) {
    if (bits < 20) bits = 20;
    if (bits > 62) bits = 62;
    const std::uint64_t lo = 1ull << (bits - 1);
    const std::uint64_t hi = (1ull << bits) - 1;
    std::uniform_int_distribution<std::uint64_t> dist(lo, hi);
    for (;;) {
        std::uint64_t c = dist(rng) | 1ull;
        if (detail::is_prime_u64(c)) return c;
    }
}

// Number of bits used for engine primes; override via CURVELAB_PRIME_BITS.
unsigned prime_bits_from_env();

} // namespace curvelab
