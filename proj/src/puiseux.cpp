#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "curvelab/branch.hpp"
#include "curvelab/errors.hpp"
#include "curvelab/primefield.hpp"

// Branch decomposition by the classical edge-substitution recursion,
// restricted to expansions whose coefficients stay rational.

namespace curvelab {

namespace {

// ---- reducedness of the non-axis part --------------------------------------

// f as a polynomial in y with univariate (x-only) BivarPoly coefficients.
std::vector<BivarPoly> y_coefficients(const BivarPoly& f) {
    std::vector<BivarPoly> out(f.deg_y() + 1, BivarPoly::zero());
    for (const auto& [k, c] : f.terms) out[k.second].add_term(k.first, 0, c);
    return out;
}

unsigned ydeg(const std::vector<BivarPoly>& a) {
    for (size_t i = a.size(); i-- > 0;)
        if (!a[i].is_zero()) return static_cast<unsigned>(i);
    return 0;
}

bool yzero(const std::vector<BivarPoly>& a) {
    for (const auto& c : a)
        if (!c.is_zero()) return false;
    return true;
}

void ytrim(std::vector<BivarPoly>& a) {
    while (a.size() > 1 && a.back().is_zero()) a.pop_back();
}

// lc(B)^(deg A - deg B + 1) * A mod B, the classical pseudo-remainder.
std::vector<BivarPoly> pseudo_rem(std::vector<BivarPoly> a, const std::vector<BivarPoly>& b) {
    unsigned db = ydeg(b);
    const BivarPoly& lb = b[db];
    unsigned da = ydeg(a);
    long steps = static_cast<long>(da) - static_cast<long>(db) + 1;
    for (long s = 0; s < steps; ++s) {
        da = ydeg(a);
        if (yzero(a) || da < db) {
            // keep multiplying so the normalization factor stays lc(B)^(steps)
            for (auto& c : a) c = c * lb;
            continue;
        }
        BivarPoly la = a[da];
        for (auto& c : a) c = c * lb;
        for (unsigned j = 0; j <= db; ++j) a[da - db + j] = a[da - db + j] - la * b[j];
        ytrim(a);
    }
    ytrim(a);
    return a;
}

// Subresultant PRS; returns the last nonzero remainder-chain element with
// positive y-degree when A and B share a y-dependent factor, else nullopt.
std::optional<std::vector<BivarPoly>> subresultant_common_factor(std::vector<BivarPoly> a, std::vector<BivarPoly> b) {
    if (ydeg(a) < ydeg(b)) std::swap(a, b);
    if (yzero(b)) return ydeg(a) > 0 ? std::optional(a) : std::nullopt;
    BivarPoly g = BivarPoly::constant(1), h = BivarPoly::constant(1);
    for (;;) {
        unsigned da = ydeg(a), db = ydeg(b);
        unsigned d = da - db;
        auto r = pseudo_rem(a, b);
        if (yzero(r)) return ydeg(b) > 0 ? std::optional(b) : std::nullopt;
        if (ydeg(r) == 0 && db == 0) return std::nullopt;
        BivarPoly divisor = g;
        for (unsigned i = 0; i < d; ++i) divisor = divisor * h;
        for (auto& c : r) c = bivar_divide_exact(c, divisor);
        a = std::move(b);
        b = std::move(r);
        g = a[ydeg(a)];
        // h = g^d * h^(1-d)
        if (d == 0) {
            // h unchanged
        } else {
            BivarPoly hn = g;
            for (unsigned i = 1; i < d; ++i) hn = hn * g;
            for (unsigned i = 1; i < d; ++i) hn = bivar_divide_exact(hn, h);
            h = hn;
        }
        if (ydeg(b) == 0) return std::nullopt;
    }
}

// gcd of x-only polynomials, monic Euclid.
BivarPoly xpoly_gcd(BivarPoly a, BivarPoly b) {
    auto deg = [](const BivarPoly& p) { return p.deg_x(); };
    while (!b.is_zero()) {
        // a mod b
        while (!a.is_zero() && deg(a) >= deg(b)) {
            Rat q = a.coeff(deg(a), 0) / b.coeff(deg(b), 0);
            BivarPoly t = a - BivarPoly::monomial(deg(a) - deg(b), 0, q) * b;
            if (!t.is_zero() && t.deg_x() >= deg(a) && t.coeff(deg(a), 0) != 0)
                throw InvalidElimination("univariate remainder did not reduce");
            a = std::move(t);
        }
        std::swap(a, b);
    }
    return a.is_zero() ? a : bivar_normalize(a);
}

// Germ-level repeated-factor detection for f with no axis factor.
bool has_repeated_factor_through_origin(const BivarPoly& f) {
    unsigned dy = f.deg_y();
    if (dy == 0) return false;
    BivarPoly fy = bivar_dy(f);
    unsigned res_deg_bound = 2 * f.deg_x() * dy + 1;

    // Fast path: a single nonzero specialized resultant proves reducedness.
    std::mt19937_64 rng(0xC0FFEEu);
    for (int pass = 0; pass < 2; ++pass) {
        uint64_t p = random_prime(rng, prime_bits_from_env());
        PrimeField F{p};
        unsigned valid_zeros = 0;
        bool nonzero_found = false, mapped = true;
        try {
            for (uint64_t x0 = 0; x0 < res_deg_bound + 4 * f.deg_x() + 4 && valid_zeros <= res_deg_bound; ++x0) {
                // univariate images in y at x = x0
                std::vector<uint64_t> A(dy + 1, 0), B(dy, 0);
                for (const auto& [k, c] : f.terms) {
                    uint64_t xp = detail::powmod_u64(x0 % p, k.first, p);
                    A[k.second] = F.add(A[k.second], F.mul(F.from_rat(c), xp));
                }
                for (const auto& [k, c] : fy.terms) {
                    uint64_t xp = detail::powmod_u64(x0 % p, k.first, p);
                    B[k.second] = F.add(B[k.second], F.mul(F.from_rat(c), xp));
                }
                if (A[dy] == 0 || (dy >= 1 && B[dy - 1] == 0)) continue; // degree dropped
                // resultant by Euclid
                std::vector<uint64_t> u = A, v = B;
                uint64_t res = 1;
                auto degv = [&](const std::vector<uint64_t>& w) {
                    for (size_t i = w.size(); i-- > 0;)
                        if (w[i]) return static_cast<long>(i);
                    return -1l;
                };
                bool zero = false;
                for (;;) {
                    long du = degv(u), dv2 = degv(v);
                    if (dv2 < 0) {
                        zero = true;
                        break;
                    }
                    if (dv2 == 0) {
                        res = F.mul(res, detail::powmod_u64(v[0], static_cast<uint64_t>(std::max(0l, du)), p));
                        break;
                    }
                    // u mod v
                    uint64_t lv = v[dv2];
                    uint64_t linv = F.inv(lv);
                    std::vector<uint64_t> r = u;
                    for (long k2 = du; k2 >= dv2; --k2) {
                        long dr = degv(r);
                        if (dr < dv2) break;
                        uint64_t c0 = F.mul(r[dr], linv);
                        for (long j = 0; j <= dv2; ++j) r[dr - dv2 + j] = F.sub(r[dr - dv2 + j], F.mul(c0, v[j]));
                    }
                    long dr = degv(r);
                    if ((du & 1) && (dv2 & 1)) res = F.neg(res);
                    res = F.mul(res, detail::powmod_u64(lv, static_cast<uint64_t>(du - (dr < 0 ? 0 : dr)), p));
                    if (dr < 0) {
                        zero = true;
                        break;
                    }
                    u = std::move(v);
                    v = std::move(r);
                    v.resize(dr + 1);
                }
                if (zero) {
                    ++valid_zeros;
                } else {
                    nonzero_found = true;
                    break;
                }
            }
        } catch (const Error&) {
            mapped = false; // prime hit a denominator; try the next prime
        }
        if (mapped && nonzero_found) return false;
        if (!mapped) --pass;
    }
    // Both primes saw an identically zero resultant: confirm exactly.
    auto common = subresultant_common_factor(y_coefficients(f), y_coefficients(fy));
    if (!common) return false;
    // Primitive part; the content is a unit at the origin since x does not
    // divide f.
    BivarPoly content;
    for (const auto& c : *common) {
        if (c.is_zero()) continue;
        content = content.is_zero() ? bivar_normalize(c) : xpoly_gcd(content, c);
        if (content.deg_x() == 0) break;
    }
    Rat at_origin = 0;
    for (size_t k = 0; k < common->size(); ++k) {
        BivarPoly pp = content.deg_x() == 0 ? (*common)[k] : bivar_divide_exact((*common)[k], content);
        if (k == 0) at_origin = pp.coeff(0, 0);
    }
    return at_origin == 0;
}

// ---- rational root extraction ----------------------------------------------

std::vector<Int> divisors_of(Int n, bool& complete) {
    complete = true;
    n = boost::multiprecision::abs(n);
    std::map<Int, unsigned> fact;
    for (uint64_t d = 2; d <= 1000000ull && Int(d) * d <= n; d += (d == 2 ? 1 : 2)) {
        while (n % d == 0) {
            ++fact[Int(d)];
            n /= d;
        }
    }
    if (n > 1) {
        bool prime = n < (Int(1) << 62) ? detail::is_prime_u64(n.convert_to<uint64_t>()) : false;
        if (prime) ++fact[n];
        else if (n < 1000000ull * 1000000ull) ++fact[n]; // below the trial bound squared: prime
        else complete = false;
    }
    std::vector<Int> divs{1};
    for (const auto& [pr, e] : fact) {
        size_t base = divs.size();
        Int pw = 1;
        for (unsigned i = 1; i <= e; ++i) {
            pw *= pr;
            for (size_t k = 0; k < base; ++k) {
                divs.push_back(divs[k] * pw);
                if (divs.size() > 20000) {
                    complete = false;
                    return divs;
                }
            }
        }
    }
    return divs;
}

// All rational roots with multiplicities; throws when the coefficient
// pattern defeats the bounded factoring of the endpoints.
std::vector<std::pair<Rat, unsigned>> rational_roots(std::vector<Rat> poly) {
    while (!poly.empty() && poly.back() == 0) poly.pop_back();
    if (poly.size() <= 1) return {};
    Int den(1);
    for (const auto& c : poly) {
        Int d = denominator(c);
        den = den / boost::multiprecision::gcd(den, d) * d;
    }
    std::vector<Int> ip(poly.size());
    for (size_t i = 0; i < poly.size(); ++i) ip[i] = numerator(poly[i] * Rat(den));
    size_t low = 0;
    while (ip[low] == 0) ++low; // w = 0 roots are never used by the caller
    bool c1 = false, c2 = false;
    auto dnum = divisors_of(ip[low], c1);
    auto dden = divisors_of(ip.back(), c2);
    if (!c1 || !c2)
        throw UnsupportedCoefficientField("cannot enumerate candidate rational roots of an edge polynomial");
    std::vector<std::pair<Rat, unsigned>> out;
    auto eval = [&](const std::vector<Rat>& q, const Rat& v) {
        Rat acc = 0;
        for (size_t i = q.size(); i-- > 0;) acc = acc * v + q[i];
        return acc;
    };
    std::vector<Rat> work(poly.begin() + low, poly.end());
    for (const Int& a : dnum) {
        for (const Int& b : dden) {
            for (int sign = 0; sign < 2; ++sign) {
                Rat cand = sign ? Rat(-Rat(a, b)) : Rat(a, b);
                if (eval(work, cand) != 0) continue;
                unsigned mult = 0;
                for (;;) {
                    // deflate by (w - cand)
                    std::vector<Rat> q(work.size() - 1);
                    Rat carry = 0;
                    for (size_t i = work.size(); i-- > 1;) {
                        q[i - 1] = work[i] + carry;
                        carry = q[i - 1] * cand;
                    }
                    if (work[0] + carry != 0) break;
                    ++mult;
                    work = std::move(q);
                    if (work.size() <= 1) break;
                    if (eval(work, cand) != 0) break;
                }
                if (mult) out.push_back({cand, mult});
                if (work.size() <= 1) return out;
            }
        }
    }
    return out;
}

std::optional<Rat> rational_nth_root(const Rat& w, unsigned p) {
    if (w == 0) return Rat(0);
    bool neg = w < 0;
    if (neg && p % 2 == 0) return std::nullopt;
    Int num = boost::multiprecision::abs(numerator(w)), den = denominator(w);
    Int rn, rd;
    int exact_n = mpz_root(rn.backend().data(), num.backend().data(), p);
    int exact_d = mpz_root(rd.backend().data(), den.backend().data(), p);
    if (!exact_n || !exact_d) return std::nullopt;
    Rat r(rn, rd);
    return neg ? Rat(-r) : r;
}

// ---- the expansion recursion -----------------------------------------------

struct Edge {
    unsigned a1, b1, a2, b2; // from the y-axis end (b1 > b2) down to b2
    unsigned p, q;           // slope q/p in lowest terms
};

std::vector<Edge> newton_polygon(const BivarPoly& g) {
    // Walk the lower-left hull from the minimal point on the y-axis side to
    // the x-axis.  Assumes x and y do not divide g and g(0,0) = 0.
    std::vector<std::pair<unsigned, unsigned>> pts;
    for (const auto& [k, c] : g.terms) pts.push_back(k);
    unsigned besty = ~0u;
    for (auto& [a, b] : pts)
        if (a == 0) besty = std::min(besty, b);
    std::pair<unsigned, unsigned> cur{0, besty};
    std::vector<Edge> edges;
    while (cur.second > 0) {
        std::pair<unsigned, unsigned> next = cur;
        Rat best_slope;
        bool have = false;
        for (auto& [a, b] : pts) {
            if (b >= cur.second || a <= cur.first) continue;
            Rat slope(static_cast<long>(a - cur.first), static_cast<long>(cur.second - b));
            if (!have || slope < best_slope ||
                (slope == best_slope && cur.second - b > cur.second - next.second)) {
                have = true;
                best_slope = slope;
                next = {a, b};
            }
        }
        if (!have) throw InvalidElimination("polygon walk found no descent");
        Edge e;
        e.a1 = cur.first;
        e.b1 = cur.second;
        e.a2 = next.first;
        e.b2 = next.second;
        unsigned da = e.a2 - e.a1, db = e.b1 - e.b2;
        unsigned g2 = std::gcd(da, db);
        e.q = da / g2;
        e.p = db / g2;
        edges.push_back(e);
        cur = next;
    }
    return edges;
}

// g(x^p, x^q (c + y)) / x^w  with w the minimal weight.
BivarPoly edge_substitute(const BivarPoly& g, unsigned p, unsigned q, const Rat& c) {
    BivarPoly acc;
    for (const auto& [k, coeff] : g.terms) {
        unsigned base = k.first * p + k.second * q;
        // (c + y)^b expanded
        std::vector<Rat> row(k.second + 1);
        row[0] = 1;
        for (unsigned i = 1; i <= k.second; ++i) row[i] = row[i - 1] * Rat(k.second - i + 1) / Rat(i);
        Rat cp = 1;
        for (unsigned i = 0; i <= k.second; ++i) {
            // coefficient of y^(b-i): C(b,i) * c^i
            acc.add_term(base, k.second - i, coeff * row[i] * cp);
            cp *= c;
        }
    }
    unsigned w = ~0u;
    for (const auto& [k, coeff] : acc.terms) w = std::min(w, k.first);
    BivarPoly out;
    for (const auto& [k, coeff] : acc.terms) out.terms[{k.first - w, k.second}] = coeff;
    return out;
}

// True iff the polynomial prefix of y (through degree dmax) is an exact root
// of g.  g(x, prefix) has degree below Texact, so vanishing of the series to
// that precision decides it.  A modular evaluation rejects almost every
// inexact tail cheaply; only a modular zero pays for the rational run.
bool poly_root_check(const BivarPoly& g, const TruncSeries& y, unsigned dmax, unsigned Texact) {
    std::mt19937_64 rng(0x5bf03635u ^ (static_cast<std::uint64_t>(dmax) * 1000003u));
    for (int attempt = 0; attempt < 8; ++attempt) {
        PrimeField pf(random_prime(rng, 62));
        try {
            auto ym = ser_zero(pf, Texact);
            for (unsigned i = 0; i <= dmax && i < y.c.size(); ++i) ym.c[i] = pf.from_rat(y.c[i]);
            auto val = poly_eval_series(pf, g, ser_monomial(pf, Texact, 1, pf.one()), ym);
            if (ser_order(pf, val)) return false;
        } catch (const Error&) {
            continue; // the prime divides a coefficient denominator
        }
        RatField rf;
        auto yx = ser_zero(rf, Texact);
        for (unsigned i = 0; i <= dmax && i < y.c.size(); ++i) yx.c[i] = y.c[i];
        auto val = poly_eval_series(rf, g, ser_monomial(rf, Texact, 1, rf.one()), yx);
        return !ser_order(rf, val).has_value();
    }
    throw Error("root exactness check ran out of usable primes");
}

// Newton refinement of the unique simple root y(x), y(0)=0, of g.  Correct
// digits double per round, so the ladder keeps every round but the last few
// at small precision.
Parametrization solve_simple_root(const BivarPoly& g, unsigned need) {
    RatField f;
    BivarPoly gy = bivar_dy(g);
    unsigned prec = std::min(need, 8u);
    auto y = ser_zero(f, prec);
    bool converged = false;
    for (unsigned round = 0; round < 96 && !converged; ++round) {
        auto xs = ser_monomial(f, prec, 1, f.one());
        auto yt = ser_truncate(f, y, prec);
        auto val = poly_eval_series(f, g, xs, yt);
        if (!ser_order(f, val)) {
            y = yt;
            if (prec >= need) {
                converged = true;
            } else {
                prec = std::min(need, prec * 2);
            }
            continue;
        }
        auto der = poly_eval_series(f, gy, xs, yt);
        auto corr = ser_mul(f, val, ser_inverse_unit(f, der));
        y = ser_sub(f, yt, corr);
    }
    if (!converged) throw InvalidElimination("simple-root refinement failed to converge");
    Parametrization out;
    out.n = 1;
    out.y = y;
    // Exact when substituting the polynomial tail reproduces zero identically.
    unsigned dmax = 0;
    for (unsigned i = 0; i < y.c.size(); ++i)
        if (y.c[i] != 0) dmax = i;
    unsigned Texact = g.deg_x() + g.deg_y() * std::max(1u, dmax) + 1;
    if (Texact > need) {
        out.exact = poly_root_check(g, y, dmax, Texact);
    } else {
        out.exact = true;
    }
    if (out.exact) {
        TruncSeries tight = TruncSeries::zero(dmax, Rat(0));
        for (unsigned i = 0; i <= dmax; ++i) tight.c[i] = y.c[i];
        out.y = tight;
    }
    return out;
}

enum class TopFilter { All, SlopeAtLeastOne, SlopeAboveOne };

std::vector<Parametrization> expand_all(const BivarPoly& g_in, unsigned need, TopFilter filter);

// One edge: solve the edge polynomial in w = c^p and recurse per root.
void expand_edge(const BivarPoly& g, const Edge& e, unsigned need, std::vector<Parametrization>& out) {
    unsigned steps = (e.b1 - e.b2) / e.p;
    std::vector<Rat> phi(steps + 1);
    for (unsigned k = 0; k <= steps; ++k)
        phi[steps - k] = g.coeff(e.a1 + k * e.q, e.b1 - k * e.p);
    auto roots = rational_roots(phi);
    unsigned covered = 0;
    for (const auto& [w, mult] : roots) covered += mult;
    if (covered < steps)
        throw UnsupportedCoefficientField("edge polynomial has a non-rational root");
    for (const auto& [w, mult] : roots) {
        auto c = rational_nth_root(w, e.p);
        if (!c) throw UnsupportedCoefficientField("edge coefficient needs an irrational radical");
        if (e.p % 2 == 0 && *c < 0) continue; // conjugate twin of the +c branch
        Rat root = *c;
        if (e.p % 2 == 0 && root < 0) root = -root;
        BivarPoly g1 = edge_substitute(g, e.p, e.q, root);
        auto subs = expand_all(g1, need, TopFilter::All);
        for (auto& s : subs) {
            Parametrization lifted;
            lifted.n = e.p * s.n;
            unsigned shift = e.q * s.n;
            unsigned tr = std::min<uint64_t>(static_cast<uint64_t>(shift) + s.y.trunc, 4u << 20);
            lifted.y = TruncSeries::zero(tr, Rat(0));
            if (shift <= tr) lifted.y.c[shift] = root;
            for (unsigned i = 0; i < s.y.c.size() && shift + i <= tr; ++i)
                if (s.y.c[i] != 0) lifted.y.c[shift + i] += s.y.c[i];
            lifted.exact = s.exact;
            if (lifted.exact) {
                unsigned dmax = 0;
                for (unsigned i = 0; i < lifted.y.c.size(); ++i)
                    if (lifted.y.c[i] != 0) dmax = i;
                TruncSeries tight = TruncSeries::zero(dmax, Rat(0));
                for (unsigned i = 0; i <= dmax; ++i) tight.c[i] = lifted.y.c[i];
                lifted.y = tight;
            }
            out.push_back(std::move(lifted));
        }
    }
}

std::vector<Parametrization> expand_all(const BivarPoly& g_in, unsigned need, TopFilter filter) {
    std::vector<Parametrization> out;
    BivarPoly g = g_in;
    if (bivar_divisible_by_y(g)) {
        Parametrization axis;
        axis.n = 1;
        axis.y = TruncSeries::zero(0, Rat(0));
        axis.exact = true;
        out.push_back(axis);
        g = bivar_strip_y(g);
    }
    if (g.coeff(0, 0) != 0) return out;
    // Unique smooth solution: Newton refinement replaces the recursion.
    if (g.coeff(0, 1) != 0) {
        auto p = solve_simple_root(g, need);
        RatField rf;
        auto o = ser_order(rf, p.y);
        bool keep = true;
        if (filter == TopFilter::SlopeAboveOne) keep = !o || *o > 1;
        if (keep) out.push_back(std::move(p));
        return out;
    }
    for (const auto& e : newton_polygon(g)) {
        if (filter == TopFilter::SlopeAtLeastOne && e.q < e.p) continue;
        if (filter == TopFilter::SlopeAboveOne && e.q <= e.p) continue;
        expand_edge(g, e, need, out);
    }
    return out;
}

} // namespace

BranchList newton_puiseux(const BivarPoly& f, unsigned trunc_hint) {
    if (f.is_zero()) throw InvalidParametrization("zero polynomial has no branch decomposition");
    if (f.coeff(0, 0) != 0) throw InvalidParametrization("curve does not pass through the origin");
    unsigned need = trunc_hint;
    if (need == 0) need = 2 * (f.deg_x() + 1) * (f.deg_y() + 1) + 32;

    BranchList out;
    BivarPoly g = f;
    if (bivar_divisible_by_y(g)) {
        g = bivar_strip_y(g);
        if (bivar_divisible_by_y(g)) throw NonReducedInput("y^2 divides the input");
        Parametrization xaxis;
        xaxis.n = 1;
        xaxis.y = TruncSeries::zero(0, Rat(0));
        out.push_back(xaxis);
    }
    if (bivar_divisible_by_x(g)) {
        g = bivar_strip_x(g);
        if (bivar_divisible_by_x(g)) throw NonReducedInput("x^2 divides the input");
        Parametrization yaxis;
        yaxis.n = 1;
        yaxis.y = TruncSeries::zero(0, Rat(0));
        yaxis.axis_swap = true;
        out.push_back(yaxis);
    }
    if (g.coeff(0, 0) != 0) {
        if (out.empty()) throw InvalidParametrization("curve does not pass through the origin");
        return out;
    }
    if (has_repeated_factor_through_origin(g)) throw NonReducedInput("repeated branch through the origin");

    auto main_part = expand_all(g, need, TopFilter::SlopeAtLeastOne);
    for (auto& b : main_part) out.push_back(std::move(b));
    auto swapped_part = expand_all(bivar_swap_xy(g), need, TopFilter::SlopeAboveOne);
    for (auto& b : swapped_part) {
        b.axis_swap = true;
        out.push_back(std::move(b));
    }
    for (const auto& b : out) validate_parametrization(b);
    return out;
}

} // namespace curvelab
