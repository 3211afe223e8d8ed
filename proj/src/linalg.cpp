#include "curvelab/linalg.hpp"

#include <cstdlib>
#include <random>

#include "curvelab/errors.hpp"

namespace curvelab {

size_t rank_rational(const Mat<Rat>& m) {
    RatField f;
    return rank_field(f, m);
}

namespace {

// Fails (returns false) when a prime divides some coefficient denominator.
bool rank_mod_prime(const Mat<Rat>& m, uint64_t p, size_t& out) {
    PrimeField f{p};
    Mat<uint64_t> mm(m.rows, m.cols);
    try {
        for (size_t i = 0; i < m.a.size(); ++i) mm.a[i] = rat_mod(m.a[i], p);
    } catch (const Error&) {
        return false;
    }
    out = rank_field(f, mm);
    return true;
}

} // namespace

size_t rank_two_prime(const Mat<Rat>& m, uint64_t seed) {
    std::mt19937_64 rng(seed);
    unsigned bits = prime_bits_from_env();
    size_t r1 = 0, r2 = 0;
    bool ok1 = false, ok2 = false;
    for (int attempt = 0; attempt < 16 && !(ok1 && ok2); ++attempt) {
        uint64_t p = random_prime(rng, bits);
        size_t r = 0;
        if (!rank_mod_prime(m, p, r)) continue;
        if (!ok1) {
            r1 = r;
            ok1 = true;
        } else {
            r2 = r;
            ok2 = true;
        }
    }
    if (ok1 && ok2 && r1 == r2) return r1;
    return rank_rational(m);
}

unsigned prime_bits_from_env() {
    const char* v = std::getenv("CURVELAB_PRIME_BITS");
    if (!v) return 62;
    long n = std::strtol(v, nullptr, 10);
    if (n < 20) return 20;
    if (n > 62) return 62;
    return static_cast<unsigned>(n);
}

} // namespace curvelab
