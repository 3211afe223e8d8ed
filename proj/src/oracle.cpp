#include "curvelab/oracle.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <utility>

#include "curvelab/errors.hpp"
#include "curvelab/primefield.hpp"

namespace curvelab {

namespace {

// Monomials ordered by total degree, then y-exponent; degree-d block starts
// at d(d+1)/2.
inline std::size_t mono_count(unsigned deg) {
    return static_cast<std::size_t>(deg) * (deg + 1) / 2;
}

inline std::size_t mono_index(unsigned a, unsigned b) {
    return mono_count(a + b) + b;
}

// Generator reduced modulo p.  mult is the exact multiplicity, even when the
// lowest term vanishes in the residue field.
struct ModGen {
    unsigned mult = 0;
    std::vector<std::pair<unsigned, unsigned>> expo;
    std::vector<std::uint64_t> coef;
};

std::vector<ModGen> reduce_gens(const std::vector<BivarPoly>& gens, std::uint64_t p) {
    PrimeField f{p};
    std::vector<ModGen> out;
    for (const auto& g : gens) {
        if (g.is_zero()) continue;
        ModGen m;
        m.mult = g.multiplicity();
        for (const auto& [k, c] : g.terms) {
            std::uint64_t r = f.from_rat(c);
            if (!r) continue;
            m.expo.push_back(k);
            m.coef.push_back(r);
        }
        if (m.expo.empty()) throw Error("generator vanishes modulo the working prime");
        out.push_back(std::move(m));
    }
    return out;
}

// Incremental row echelon keyed by pivot column; stored rows are suffixes
// from their pivot, normalized to leading coefficient 1.
struct Echelon {
    PrimeField f;
    std::size_t cols;
    std::vector<std::int32_t> owner;              // column -> stored row, -1 if free
    std::vector<std::vector<std::uint64_t>> rows; // suffix from the pivot column

    Echelon(std::uint64_t p, std::size_t cols_) : f{p}, cols(cols_), owner(cols_, -1) {}

    void absorb(std::vector<std::uint64_t>& s, std::size_t lo) {
        for (std::size_t j = lo; j < cols; ++j) {
            if (s[j] == 0) continue;
            std::int32_t r = owner[j];
            if (r < 0) {
                std::uint64_t scale = f.inv(s[j]);
                std::vector<std::uint64_t> suf(cols - j);
                for (std::size_t k = j; k < cols; ++k) suf[k - j] = f.mul(s[k], scale);
                owner[j] = static_cast<std::int32_t>(rows.size());
                rows.push_back(std::move(suf));
                return;
            }
            const auto& b = rows[static_cast<std::size_t>(r)];
            std::uint64_t c = f.neg(s[j]);
            for (std::size_t k = 0; k < b.size(); ++k)
                s[j + k] = f.add(s[j + k], f.mul(c, b[k]));
        }
    }
};

// dims[D] = dim of span(monomials of degree < D) modulo the truncated
// monomial multiples of the generators, for every D up to Dmax at once.
// Rows beyond a given D only touch columns of degree >= D, so one echelon
// at Dmax serves the whole profile.
std::vector<std::uint64_t> dims_profile(const std::vector<ModGen>& gens, unsigned Dmax,
                                        std::uint64_t p) {
    const std::size_t cols = mono_count(Dmax);
    Echelon ech(p, cols);
    PrimeField f{p};
    std::vector<std::uint64_t> scratch(cols, 0);
    // Multiplier degree sweeps upward so most rows reduce against settled
    // low-degree pivots.
    for (unsigned d = 0;; ++d) {
        bool any = false;
        for (const auto& g : gens) {
            if (g.mult + d >= Dmax) continue;
            any = true;
            for (unsigned bm = 0; bm <= d; ++bm) {
                const unsigned am = d - bm;
                std::fill(scratch.begin(), scratch.end(), 0);
                std::size_t lo = cols;
                for (std::size_t t = 0; t < g.expo.size(); ++t) {
                    const unsigned a = g.expo[t].first + am;
                    const unsigned b = g.expo[t].second + bm;
                    if (a + b >= Dmax) continue;
                    const std::size_t col = mono_index(a, b);
                    scratch[col] = f.add(scratch[col], g.coef[t]);
                    lo = std::min(lo, col);
                }
                if (lo < cols) ech.absorb(scratch, lo);
            }
        }
        if (!any) break;
    }
    std::vector<std::size_t> piv;
    for (std::size_t j = 0; j < cols; ++j)
        if (ech.owner[j] >= 0) piv.push_back(j);
    std::vector<std::uint64_t> dims(Dmax + 1, 0);
    std::size_t k = 0;
    for (unsigned D = 1; D <= Dmax; ++D) {
        const std::size_t m = mono_count(D);
        while (k < piv.size() && piv[k] < m) ++k;
        dims[D] = m - k;
    }
    return dims;
}

std::optional<std::uint64_t> stabilized(const std::vector<std::uint64_t>& dims, unsigned Dmax,
                                        unsigned step) {
    for (unsigned D = 1; D + 2 * step <= Dmax; ++D)
        if (dims[D] == dims[D + step] && dims[D] == dims[D + 2 * step]) return dims[D];
    return std::nullopt;
}

std::uint64_t run_prime(const std::vector<ModGen>& gens, std::uint64_t p, unsigned step,
                        unsigned cap) {
    unsigned dmax = std::min(cap, 3 * step + 6);
    for (;;) {
        double nrows = 0;
        for (const auto& g : gens) {
            if (g.mult >= dmax) continue;
            const double n = dmax - g.mult;
            nrows += n * (n + 1) / 2;
        }
        const double ncols = static_cast<double>(mono_count(dmax));
        if (nrows * ncols * ncols / 4 > 4e11)
            throw OracleInconclusive("truncated quotient exceeded its cost budget");
        auto dims = dims_profile(gens, dmax, p);
        if (auto v = stabilized(dims, dmax, step)) return *v;
        if (dmax >= cap)
            throw OracleInconclusive("truncated quotient did not stabilize below the degree cap");
        dmax = std::min(cap, dmax + std::max(step, dmax / 2));
    }
}

// Stabilized colength modulo independently drawn primes: two agreeing values
// win, a third prime breaks a tie, anything else is inconclusive.  Primes
// dividing a coefficient denominator are redrawn.
std::uint64_t colength_protocol(const std::vector<BivarPoly>& gens, unsigned step, unsigned cap,
                                std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    const unsigned bits = prime_bits_from_env();
    std::vector<std::uint64_t> used, vals;
    for (int attempt = 0; attempt < 16; ++attempt) {
        const std::uint64_t p = random_prime(rng, bits);
        if (std::find(used.begin(), used.end(), p) != used.end()) continue;
        used.push_back(p);
        try {
            vals.push_back(run_prime(reduce_gens(gens, p), p, step, cap));
        } catch (const OracleInconclusive&) {
            throw;
        } catch (const Error&) {
            continue;
        }
        if (vals.size() == 2 && vals[0] == vals[1]) return vals[0];
        if (vals.size() == 3) {
            if (vals[2] == vals[0] || vals[2] == vals[1]) return vals[2];
            throw OracleInconclusive("truncated quotient dimensions disagree across primes");
        }
    }
    throw Error("quotient oracle ran out of usable primes");
}

} // namespace

std::uint64_t quotient_dim_truncated(const std::vector<BivarPoly>& gens, unsigned D,
                                     std::uint64_t prime) {
    if (!detail::is_prime_u64(prime)) throw Error("quotient modulus is not prime");
    if (D == 0) return 0;
    return dims_profile(reduce_gens(gens, prime), D, prime)[D];
}

std::uint64_t milnor_oracle(const BivarPoly& f, std::uint64_t seed, const OracleOptions& opt) {
    if (f.is_zero()) throw Error("Milnor oracle requires a nonzero polynomial");
    const unsigned m0 = std::max(1u, f.multiplicity());
    const unsigned step = opt.step ? opt.step : m0;
    const unsigned cap = opt.cap ? opt.cap : 6 * m0 + 48;
    return colength_protocol({bivar_dx(f), bivar_dy(f)}, step, cap, seed);
}

std::uint64_t tjurina_oracle(const BivarPoly& f, std::uint64_t seed, const OracleOptions& opt) {
    if (f.is_zero()) throw Error("Tjurina oracle requires a nonzero polynomial");
    const unsigned m0 = std::max(1u, f.multiplicity());
    const unsigned step = opt.step ? opt.step : m0;
    const unsigned cap = opt.cap ? opt.cap : 6 * m0 + 48;
    return colength_protocol({f, bivar_dx(f), bivar_dy(f)}, step, cap, seed);
}

} // namespace curvelab
