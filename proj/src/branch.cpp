#include "curvelab/branch.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "curvelab/errors.hpp"
#include "curvelab/primefield.hpp"

namespace curvelab {

Parametrization make_parametrization(unsigned n, const std::vector<std::pair<unsigned, Rat>>& y_terms,
                                     bool axis_swap) {
    Parametrization p;
    p.n = n;
    p.axis_swap = axis_swap;
    p.exact = true;
    unsigned maxe = 0;
    for (const auto& [j, c] : y_terms)
        if (c != 0) maxe = std::max(maxe, j);
    p.y = TruncSeries::zero(maxe, Rat(0));
    for (const auto& [j, c] : y_terms) p.y.c[j] += c;
    validate_parametrization(p);
    return p;
}

void validate_parametrization(const Parametrization& p) {
    if (p.n < 1) throw InvalidParametrization("multiplicity must be >= 1");
    RatField f;
    auto ord = ser_order(f, p.y);
    if (!ord) {
        if (p.n != 1) throw InvalidParametrization("zero companion series with n > 1 is a multiple cover");
        return;
    }
    if (*ord == 0) throw InvalidParametrization("branch does not pass through the origin");
    if (*ord < p.n) throw InvalidParametrization("companion order below n; swap the axes");
}

unsigned param_support_max(const Parametrization& p) {
    for (unsigned i = static_cast<unsigned>(p.y.c.size()); i-- > 0;)
        if (p.y.c[i] != 0) return i;
    return 0;
}

CharData char_data(const Parametrization& p) {
    validate_parametrization(p);
    CharData cd;
    cd.beta = {p.n};
    cd.beta_bar = {p.n};
    cd.e = {p.n};
    uint64_t e = p.n;
    for (unsigned j = 0; j < p.y.c.size() && e > 1; ++j) {
        if (p.y.c[j] == 0 || j % e == 0) continue;
        uint64_t e2 = std::gcd(e, static_cast<uint64_t>(j));
        size_t k = cd.beta.size(); // this is beta_k
        if (k == 1) {
            cd.beta_bar.push_back(j);
        } else {
            cd.beta_bar.push_back(cd.n_seq[k - 2] * cd.beta_bar[k - 1] + j - cd.beta[k - 1]);
        }
        cd.beta.push_back(j);
        cd.n_seq.push_back(e / e2);
        cd.e.push_back(e2);
        e = e2;
    }
    if (e > 1) {
        if (p.exact) throw InvalidParametrization("exponent support is not primitive");
        throw TruncationTooSmall("series ends before the gcd chain reaches 1");
    }
    cd.genus = static_cast<unsigned>(cd.beta.size()) - 1;
    uint64_t c = 0;
    for (unsigned i = 1; i <= cd.genus; ++i) c += (cd.n_seq[i - 1] - 1) * cd.beta_bar[i];
    cd.conductor = c - cd.beta[0] + 1;
    return cd;
}

std::vector<char> semigroup_bitmap(const std::vector<uint64_t>& gens, uint64_t upto) {
    std::vector<char> in(upto + 1, 0);
    in[0] = 1;
    for (uint64_t g : gens) {
        if (g == 0) continue;
        for (uint64_t v = g; v <= upto; ++v)
            if (in[v - g]) in[v] = 1;
    }
    return in;
}

std::optional<uint64_t> branch_valuation(const Parametrization& p, const BivarPoly& h, unsigned T) {
    RatField f;
    auto xs = plane_x_series(f, p, T);
    auto ys = plane_y_series(f, p, T);
    auto val = poly_eval_series(f, h, xs, ys);
    auto o = ser_order(f, val);
    if (!o) return std::nullopt;
    return static_cast<uint64_t>(*o);
}

bool vanishes_on_branch(const Parametrization& p, const BivarPoly& h) {
    if (!p.exact) throw InvalidParametrization("exact vanishing test needs an exact parametrization");
    unsigned T = h.deg_x() * p.n + h.deg_y() * std::max(param_support_max(p), p.n) + 1;
    return !branch_valuation(p, h, T).has_value();
}

namespace {

// Newton interpolation through the nodes 0..values.size()-1.
std::vector<Rat> interpolate_at_integers(const std::vector<Rat>& values) {
    size_t m = values.size();
    std::vector<Rat> dd = values;
    for (size_t j = 1; j < m; ++j)
        for (size_t i = m; i-- > j;) dd[i] = (dd[i] - dd[i - 1]) / Rat(static_cast<long>(j));
    std::vector<Rat> poly{dd[m - 1]};
    for (size_t i = m - 1; i-- > 0;) {
        // poly <- poly*(x - i) + dd[i]
        poly.insert(poly.begin(), Rat(0));
        Rat node(static_cast<long>(i));
        for (size_t k = 0; k + 1 < poly.size(); ++k) poly[k] -= node * poly[k + 1];
        poly[0] += dd[i];
    }
    while (poly.size() > 1 && poly.back() == 0) poly.pop_back();
    return poly;
}

} // namespace

BivarPoly implicitize(const Parametrization& p) {
    validate_parametrization(p);
    if (!p.exact) throw InvalidParametrization("implicitize needs an exact parametrization");
    if (p.axis_swap) {
        Parametrization q = p;
        q.axis_swap = false;
        return bivar_normalize(bivar_swap_xy(implicitize(q)));
    }
    RatField rf;
    if (ser_is_zero(rf, p.y)) return BivarPoly::var_y(); // the x-axis
    char_data(p);                                        // enforces primitivity
    unsigned n = p.n;
    unsigned d = param_support_max(p);
    if (n == 1) {
        BivarPoly f = BivarPoly::var_y();
        for (unsigned j = 0; j < p.y.c.size(); ++j)
            if (p.y.c[j] != 0) f.add_term(j, 0, -p.y.c[j]);
        return bivar_normalize(f);
    }
    // Multiplication by y(t) on the basis 1, t, .., t^(n-1) over Q[x],
    // with t^n = x; the branch equation is the characteristic polynomial.
    unsigned dx_bound = d + n;
    std::vector<std::vector<Rat>> dets(n + 1, std::vector<Rat>(dx_bound + 1));
    for (unsigned node = 0; node <= dx_bound; ++node) {
        Rat x0(static_cast<long>(node));
        std::vector<std::vector<BivarPoly>> a(n, std::vector<BivarPoly>(n, BivarPoly::zero()));
        for (unsigned i = 0; i < n; ++i) a[i][i] = BivarPoly::var_y();
        for (unsigned j = 0; j < p.y.c.size(); ++j) {
            if (p.y.c[j] == 0) continue;
            for (unsigned col = 0; col < n; ++col) {
                unsigned e = j + col;
                Rat v = p.y.c[j];
                for (unsigned k = 0; k < e / n; ++k) v *= x0;
                a[e % n][col] = a[e % n][col] - BivarPoly::constant(v);
            }
        }
        BivarPoly det = bivar_mat_det(std::move(a));
        for (unsigned k = 0; k <= n; ++k) dets[k][node] = det.coeff(0, k);
    }
    BivarPoly f;
    for (unsigned k = 0; k <= n; ++k) {
        auto cs = interpolate_at_integers(dets[k]);
        for (unsigned a = 0; a < cs.size(); ++a)
            if (cs[a] != 0) f.add_term(a, k, cs[a]);
    }
    f = bivar_normalize(f);
    unsigned T = f.deg_x() * n + f.deg_y() * d + 1;
    if (branch_valuation(p, f, T).has_value())
        throw InvalidElimination("implicitize postcondition failed: equation does not vanish on the branch");
    return f;
}

namespace {

struct DetOrder {
    bool finite = false;
    uint64_t order = 0;
};

// Order of the determinant of a matrix over F[[t]], by minimum-order pivot
// elimination.  Precision shrinks by each pivot order; finite=false means
// every remaining entry vanished below the surviving precision.
template <class F>
DetOrder series_det_order(const F& f, std::vector<std::vector<Series<typename F::Elt>>> m, unsigned T) {
    size_t sz = m.size();
    long prec = static_cast<long>(T);
    uint64_t total = 0;
    std::vector<char> row_done(sz, 0), col_done(sz, 0);
    for (size_t step = 0; step < sz; ++step) {
        size_t pr = sz, pc = sz;
        long best = prec;
        for (size_t i = 0; i < sz; ++i) {
            if (row_done[i]) continue;
            for (size_t j = 0; j < sz; ++j) {
                if (col_done[j]) continue;
                auto o = ser_order(f, m[i][j]);
                if (o && static_cast<long>(*o) < best) {
                    best = static_cast<long>(*o);
                    pr = i;
                    pc = j;
                }
            }
        }
        if (pr == sz) return {};
        uint64_t v = static_cast<uint64_t>(best);
        total += v;
        prec -= static_cast<long>(v);
        if (prec <= 0) return {};
        // Divide out t^v from the pivot, invert its unit, eliminate the column.
        auto unit = ser_zero(f, static_cast<unsigned>(prec));
        for (unsigned k = 0; k <= unit.trunc && v + k < m[pr][pc].c.size(); ++k) unit.c[k] = m[pr][pc].c[v + k];
        auto uinv = ser_inverse_unit(f, unit);
        for (size_t i = 0; i < sz; ++i) {
            if (row_done[i] || i == pr) continue;
            auto oi = ser_order(f, m[i][pc]);
            if (!oi) continue;
            auto shifted = ser_zero(f, static_cast<unsigned>(prec));
            for (unsigned k = 0; k <= shifted.trunc && v + k < m[i][pc].c.size(); ++k)
                shifted.c[k] = m[i][pc].c[v + k];
            auto q = ser_mul(f, shifted, uinv);
            for (size_t j = 0; j < sz; ++j) {
                if (col_done[j]) continue;
                m[i][j] = ser_sub(f, ser_truncate(f, m[i][j], static_cast<unsigned>(prec)), ser_mul(f, q, m[pr][j]));
            }
        }
        row_done[pr] = 1;
        col_done[pc] = 1;
    }
    return {true, total};
}

// Largest t-order up to which the determinant entries for direction a -> b
// are exactly those of the untruncated curves.
unsigned direction_precision(const Parametrization& a, const Parametrization& b, unsigned T) {
    uint64_t Te = T;
    if (!a.exact) Te = std::min<uint64_t>(Te, a.y.trunc + 1);
    if (!b.exact) Te = std::min<uint64_t>(Te, static_cast<uint64_t>(a.n) * ((b.y.trunc + 1) / b.n));
    return static_cast<unsigned>(Te);
}

// ord_t of (equation of b) evaluated along a, as the determinant of
// multiplication by the matching coordinate difference on F[[t]][s]/(s^n - u).
template <class F>
DetOrder intersection_direction(const F& f, const Parametrization& a, const Parametrization& b, unsigned Traw) {
    unsigned T = direction_precision(a, b, Traw);
    auto x1 = plane_x_series(f, a, T);
    auto y1 = plane_y_series(f, a, T);
    const auto& u = b.axis_swap ? y1 : x1;
    const auto& w = b.axis_swap ? x1 : y1;
    unsigned n2 = b.n;
    std::vector<Series<typename F::Elt>> upow{ser_monomial(f, T, 0, f.one())};
    unsigned maxpow = (param_support_max(b) + n2) / n2 + 1;
    for (unsigned k = 1; k <= maxpow; ++k) upow.push_back(ser_mul(f, upow.back(), u));
    std::vector<std::vector<Series<typename F::Elt>>> m(n2, std::vector<Series<typename F::Elt>>(n2, ser_zero(f, T)));
    for (unsigned i = 0; i < n2; ++i) m[i][i] = w;
    for (unsigned j = 0; j < b.y.c.size(); ++j) {
        if (b.y.c[j] == 0) continue;
        auto cf = f.from_rat(b.y.c[j]);
        for (unsigned col = 0; col < n2; ++col) {
            unsigned e = j + col;
            auto& slot = m[e % n2][col];
            slot = ser_sub(f, slot, ser_scale(f, cf, upow[e / n2]));
        }
    }
    return series_det_order(f, std::move(m), T);
}

unsigned exact_pair_bound(const Parametrization& a, const Parametrization& b) {
    // Past the t-degree of either direction's determinant, an all-zero
    // determinant proves the branches coincide.
    uint64_t sa = std::max<uint64_t>(param_support_max(a), a.n);
    uint64_t sb = std::max<uint64_t>(param_support_max(b), b.n);
    uint64_t b1 = (sb + 2 * b.n) * sa;
    uint64_t b2 = (sa + 2 * a.n) * sb;
    return static_cast<unsigned>(std::min<uint64_t>(std::max(b1, b2) + 2, 1u << 20));
}

std::optional<uint64_t> intersection_one_prime(const Parametrization& a, const Parametrization& b, unsigned T,
                                               uint64_t p) {
    PrimeField f{p};
    DetOrder ab, ba;
    try {
        ab = intersection_direction(f, a, b, T);
        ba = intersection_direction(f, b, a, T);
    } catch (const Error&) {
        return std::nullopt; // prime collided with a denominator; caller retries
    }
    if (!ab.finite || !ba.finite) {
        if (a.exact && b.exact && T >= exact_pair_bound(a, b))
            throw NonReducedInput("branches are the same curve");
        throw TruncationTooSmall("intersection order above working truncation");
    }
    if (ab.order != ba.order) return std::nullopt; // treat like a bad prime; exact pass decides
    return ab.order;
}

} // namespace

uint64_t intersection_multiplicity(const Parametrization& a, const Parametrization& b, unsigned T, uint64_t seed) {
    validate_parametrization(a);
    validate_parametrization(b);
    std::mt19937_64 rng(seed);
    unsigned bits = prime_bits_from_env();
    std::optional<uint64_t> r1, r2;
    for (int attempt = 0; attempt < 12 && !(r1 && r2); ++attempt) {
        auto r = intersection_one_prime(a, b, T, random_prime(rng, bits));
        if (!r) continue;
        if (!r1) r1 = r;
        else r2 = r;
    }
    if (r1 && r2 && *r1 == *r2) return *r1;
    // Exact pass settles disagreements and systematic bad luck.
    RatField f;
    auto ab = intersection_direction(f, a, b, T);
    auto ba = intersection_direction(f, b, a, T);
    if (!ab.finite || !ba.finite) {
        if (a.exact && b.exact && T >= exact_pair_bound(a, b)) throw NonReducedInput("branches are the same curve");
        throw TruncationTooSmall("intersection order above working truncation");
    }
    if (ab.order != ba.order) throw InvalidElimination("intersection multiplicity asymmetric");
    return ab.order;
}

uint64_t intersection_multiplicity(const Parametrization& a, const Parametrization& b) {
    unsigned T;
    if (a.exact && b.exact) {
        T = exact_pair_bound(a, b);
    } else {
        T = std::max(a.y.trunc, b.y.trunc) + 2;
    }
    return intersection_multiplicity(a, b, T);
}

DiagonalCheck diagonal_check(const Parametrization& a, const Parametrization& b) {
    DiagonalCheck out;
    CharData ca = char_data(a), cb = char_data(b);
    out.equisingular = ca.beta_bar == cb.beta_bar;
    out.intersection = intersection_multiplicity(a, b);
    out.threshold = ca.genus == 0 ? 0 : ca.n_seq.back() * ca.beta_bar.back();
    out.diagonal = out.equisingular && out.intersection > out.threshold;
    return out;
}

std::vector<std::vector<uint64_t>> pairwise_intersections(const BranchList& bs) {
    size_t r = bs.size();
    std::vector<std::vector<uint64_t>> m(r, std::vector<uint64_t>(r, 0));
    for (size_t i = 0; i < r; ++i)
        for (size_t j = i + 1; j < r; ++j) m[i][j] = m[j][i] = intersection_multiplicity(bs[i], bs[j]);
    return m;
}

unsigned default_truncation(uint64_t conductor, uint64_t max_pair_intersection, unsigned multiplicity) {
    return static_cast<unsigned>(conductor + max_pair_intersection + multiplicity + 8);
}

} // namespace curvelab
