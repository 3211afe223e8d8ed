#include "curvelab/valmod.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <type_traits>

#include "curvelab/errors.hpp"

namespace curvelab {

namespace {

constexpr unsigned kNoLead = 0xFFFFFFFFu;
constexpr long long kInfVal = std::numeric_limits<long long>::max() / 4;

// Orders of the two plane coordinates along a branch, axis_swap resolved.
// A vanishing companion series gives order "infinity".
std::pair<long long, long long> plane_orders(const Parametrization& p) {
    long long companion = kInfVal;
    for (unsigned i = 0; i < p.y.c.size(); ++i) {
        if (p.y.c[i] != 0) {
            companion = i;
            break;
        }
    }
    if (p.axis_swap) return {companion, p.n};
    return {p.n, companion};
}

long long sat_mul(long long v, long long k) {
    if (k == 0) return 0; // zeroth power is the unit even on a vanishing coordinate
    if (v >= kInfVal) return kInfVal;
    return v * k;
}

struct BlockLayout {
    std::vector<unsigned> order; // branch index per block
    std::vector<unsigned> cols;  // column budget per block (coeffs 0..cols-1)
    std::vector<unsigned> off;   // column offset per block
    unsigned total = 0;
};

BlockLayout make_layout(std::vector<unsigned> order, std::vector<unsigned> cols) {
    BlockLayout lay;
    lay.order = std::move(order);
    lay.cols = std::move(cols);
    lay.off.resize(lay.cols.size());
    unsigned at = 0;
    for (size_t b = 0; b < lay.cols.size(); ++b) {
        lay.off[b] = at;
        at += lay.cols[b];
    }
    lay.total = at;
    return lay;
}

template <class F>
using RowsOf = std::vector<std::vector<typename F::Elt>>;

// Spanning rows of the module: one row per multiplier*generator product,
// blocked per branch in layout order, coefficients 0..cols-1 per block.
// Rows that vanish on every block are dropped.
template <class F>
RowsOf<F> build_rows(const F& fld, const ValuedModule& m, const BlockLayout& lay) {
    using E = typename F::Elt;
    const size_t nb = lay.order.size();
    std::vector<Series<E>> xs, ys;
    xs.reserve(nb);
    ys.reserve(nb);
    for (size_t b = 0; b < nb; ++b) {
        const auto& p = m.params[lay.order[b]];
        unsigned tr = lay.cols[b] - 1;
        if (!p.exact && param_support_max(p) + 1 < m.T)
            throw TruncationTooSmall("parametrization data below module precision");
        xs.push_back(plane_x_series(fld, p, tr));
        ys.push_back(plane_y_series(fld, p, tr));
    }
    std::vector<std::vector<Series<E>>> gens(m.generators.size());
    for (size_t j = 0; j < m.generators.size(); ++j) {
        for (size_t b = 0; b < nb; ++b) {
            const auto& src = m.generators[j][lay.order[b]];
            unsigned tr = lay.cols[b] - 1;
            if (src.trunc < tr) throw TruncationTooSmall("module precision below requested box");
            Series<E> s = ser_zero(fld, tr);
            for (unsigned i = 0; i <= tr; ++i) s.c[i] = fld.from_rat(src.c[i]);
            gens[j].push_back(std::move(s));
        }
    }
    RowsOf<F> rows;
    rows.reserve(m.multipliers.size() * m.generators.size());
    std::vector<Series<E>> xpow, cur;
    for (size_t b = 0; b < nb; ++b) xpow.push_back(ser_monomial(fld, lay.cols[b] - 1, 0, fld.one()));
    cur = xpow;
    unsigned cur_a = 0, cur_b = 0;
    for (const auto& [ma, mb] : m.multipliers) {
        while (cur_a < ma) {
            for (size_t b = 0; b < nb; ++b) xpow[b] = ser_mul(fld, xpow[b], xs[b]);
            ++cur_a;
            cur = xpow;
            cur_b = 0;
        }
        if (mb < cur_b) {
            cur = xpow;
            cur_b = 0;
        }
        while (cur_b < mb) {
            for (size_t b = 0; b < nb; ++b) cur[b] = ser_mul(fld, cur[b], ys[b]);
            ++cur_b;
        }
        for (size_t j = 0; j < m.generators.size(); ++j) {
            std::vector<E> row(lay.total, fld.zero());
            bool nonzero = false;
            for (size_t b = 0; b < nb; ++b) {
                auto prod = ser_mul(fld, cur[b], gens[j][b]);
                for (unsigned i = 0; i < lay.cols[b]; ++i) {
                    row[lay.off[b] + i] = prod.c[i];
                    if (!fld.is_zero(prod.c[i])) nonzero = true;
                }
            }
            if (nonzero) rows.push_back(std::move(row));
        }
    }
    return rows;
}

// Forward elimination restricted to the column window [lo, hi).  Each row is
// reduced against earlier pivots; a fresh lead is normalized to 1 and
// registered.  Returns the per-row lead column (absolute) or kNoLead.
template <class F>
std::vector<unsigned> window_echelon(const F& fld, RowsOf<F>& rows, unsigned lo, unsigned hi) {
    std::vector<unsigned> lead(rows.size(), kNoLead);
    std::vector<int> piv(hi - lo, -1);
    for (size_t i = 0; i < rows.size(); ++i) {
        auto& row = rows[i];
        for (unsigned c = lo; c < hi; ++c) {
            if (fld.is_zero(row[c])) continue;
            int pr = piv[c - lo];
            if (pr < 0) {
                auto s = fld.inv(row[c]);
                for (size_t d = c; d < row.size(); ++d)
                    if (!fld.is_zero(row[d])) row[d] = fld.mul(row[d], s);
                piv[c - lo] = static_cast<int>(i);
                lead[i] = c;
                break;
            }
            const auto coef = row[c];
            const auto& prow = rows[pr];
            for (size_t d = c; d < prow.size(); ++d)
                if (!fld.is_zero(prow[d])) row[d] = fld.sub(row[d], fld.mul(coef, prow[d]));
        }
    }
    return lead;
}

// Reorder rows so that block-window leads appear in descending order with
// no-lead rows first; the lead list is permuted alongside.
template <class Rows>
void sort_rows_desc(Rows& rows, std::vector<unsigned>& lead) {
    std::vector<size_t> idx(rows.size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    auto key = [&](size_t i) -> unsigned long long {
        return lead[i] == kNoLead ? ~0ull : lead[i];
    };
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return key(a) > key(b); });
    Rows nr;
    nr.reserve(rows.size());
    std::vector<unsigned> nl(rows.size());
    for (size_t k = 0; k < idx.size(); ++k) {
        nr.push_back(std::move(rows[idx[k]]));
        nl[k] = lead[idx[k]];
    }
    rows = std::move(nr);
    lead = std::move(nl);
}

// Rank data for prefix column unions over two blocks of one row family:
// R(a, b) = rank of (block-1 columns < a) united with (block-2 columns < b).
// Built from one echelon pass per block; the second pass runs over rows in
// descending block-1 lead order so that every threshold a cuts a prefix.
struct PairProfile {
    unsigned c1 = 0, c2 = 0;
    std::vector<std::uint32_t> p1cnt; // size c1+2: #block-1 pivots < a
    std::vector<std::uint32_t> dom;   // (c1+2) x (c2+1): #rows with lead1 >= a and lead2 < b

    long long R(unsigned a, unsigned b) const {
        return static_cast<long long>(p1cnt[std::min(a, c1 + 1u)]) +
               dom[std::min(a, c1 + 1u) * (c2 + 1u) + std::min(b, c2)];
    }
};

template <class F>
PairProfile pair_profile(const F& fld, RowsOf<F>& rows, unsigned lo1, unsigned c1, unsigned lo2,
                         unsigned c2) {
    auto lead1 = window_echelon(fld, rows, lo1, lo1 + c1);
    sort_rows_desc(rows, lead1);
    auto lead2 = window_echelon(fld, rows, lo2, lo2 + c2);

    PairProfile pp;
    pp.c1 = c1;
    pp.c2 = c2;
    pp.p1cnt.assign(c1 + 2, 0);
    std::vector<std::uint32_t> cnt((c1 + 2) * (c2 + 1), 0);
    for (size_t i = 0; i < rows.size(); ++i) {
        if (lead1[i] != kNoLead) pp.p1cnt[lead1[i] - lo1 + 1] += 1;
        if (lead2[i] == kNoLead) continue;
        unsigned d1 = lead1[i] == kNoLead ? c1 + 1 : lead1[i] - lo1;
        unsigned q2 = lead2[i] - lo2;
        cnt[d1 * (c2 + 1) + q2 + 1] += 1;
    }
    for (unsigned a = 1; a <= c1 + 1; ++a) pp.p1cnt[a] += pp.p1cnt[a - 1];
    // dom = suffix over the first index of the prefix sums over the second.
    pp.dom.assign((c1 + 2) * (c2 + 1), 0);
    for (unsigned d1 = 0; d1 <= c1 + 1; ++d1)
        for (unsigned b = 1; b <= c2; ++b)
            cnt[d1 * (c2 + 1) + b] += cnt[d1 * (c2 + 1) + b - 1];
    for (long long a = c1 + 1; a >= 0; --a)
        for (unsigned b = 0; b <= c2; ++b)
            pp.dom[a * (c2 + 1) + b] =
                cnt[a * (c2 + 1) + b] + (a <= c1 ? pp.dom[(a + 1) * (c2 + 1) + b] : 0);
    return pp;
}

void check_step(long long d, const char* what) {
    if (d < 0 || d > 1) throw Error(std::string("rank profile inconsistency in ") + what);
}

// Membership bits of the value set on the box [0, gamma] (row-major, first
// coordinate most significant).  alpha is a value of the row span iff adding
// the column (i, alpha_i) to the prefix union raises the rank for every i.
template <class F>
std::vector<char> membership_bits(const F& fld, RowsOf<F>&& rows, const BlockLayout& lay,
                                  const std::vector<long long>& gamma) {
    const size_t r = lay.order.size();
    size_t vol = 1;
    for (size_t i = 0; i < r; ++i) vol *= static_cast<size_t>(gamma[i] + 1);
    std::vector<char> bits(vol, 0);

    if (r == 1) {
        auto lead = window_echelon(fld, rows, 0, lay.cols[0]);
        std::vector<char> pivot(lay.cols[0], 0);
        for (auto l : lead)
            if (l != kNoLead) pivot[l] = 1;
        for (long long a = 0; a <= gamma[0]; ++a) bits[a] = pivot[a];
        return bits;
    }
    if (r == 2) {
        auto pp = pair_profile(fld, rows, lay.off[0], lay.cols[0], lay.off[1], lay.cols[1]);
        size_t at = 0;
        for (long long a = 0; a <= gamma[0]; ++a) {
            for (long long b = 0; b <= gamma[1]; ++b, ++at) {
                long long base = pp.R(a, b);
                long long d1 = pp.R(a + 1, b) - base;
                long long d2 = pp.R(a, b + 1) - base;
                check_step(d1, "branch 1");
                check_step(d2, "branch 2");
                bits[at] = (d1 == 1 && d2 == 1);
            }
        }
        return bits;
    }
    if (r == 3) {
        auto lead1 = window_echelon(fld, rows, 0, lay.cols[0]);
        sort_rows_desc(rows, lead1);
        std::vector<std::uint32_t> p1cnt(lay.cols[0] + 2, 0);
        for (auto l : lead1)
            if (l != kNoLead) p1cnt[l + 1] += 1;
        for (unsigned a = 1; a < p1cnt.size(); ++a) p1cnt[a] += p1cnt[a - 1];
        // Rows are sorted by descending block-1 lead, no-lead first, so the
        // rows whose lead is >= a form a prefix.
        auto prefix_size = [&](long long a) {
            size_t k = 0;
            while (k < rows.size() && (lead1[k] == kNoLead || static_cast<long long>(lead1[k]) >= a)) ++k;
            return k;
        };
        const long long g1 = gamma[0], g2 = gamma[1], g3 = gamma[2];
        PairProfile prev;
        bool have_prev = false;
        for (long long a = g1 + 1; a >= 0; --a) {
            RowsOf<F> sub(rows.begin(), rows.begin() + prefix_size(a));
            auto cur = pair_profile(fld, sub, lay.off[1], lay.cols[1], lay.off[2], lay.cols[2]);
            if (a <= g1) {
                if (!have_prev) throw Error("rank profile slab order violated");
                size_t at = static_cast<size_t>(a) * static_cast<size_t>(g2 + 1) *
                            static_cast<size_t>(g3 + 1);
                long long pa = p1cnt[a], pa1 = p1cnt[a + 1];
                for (long long b = 0; b <= g2; ++b) {
                    for (long long c = 0; c <= g3; ++c, ++at) {
                        long long base = pa + cur.R(b, c);
                        long long d1 = (pa1 + prev.R(b, c)) - base;
                        long long d2 = (pa + cur.R(b + 1, c)) - base;
                        long long d3 = (pa + cur.R(b, c + 1)) - base;
                        check_step(d1, "branch 1");
                        check_step(d2, "branch 2");
                        check_step(d3, "branch 3");
                        bits[at] = (d1 == 1 && d2 == 1 && d3 == 1);
                    }
                }
            }
            prev = std::move(cur);
            have_prev = true;
        }
        return bits;
    }
    throw Error("value-set engine supports at most three branches");
}

// Runs `work` modulo two distinct random primes and compares; escalates to
// exact rationals on disagreement.  `work` may throw Error to reject a
// prime (e.g. a coefficient denominator it divides); TruncationTooSmall
// always propagates.
template <class Work>
std::vector<char> two_prime_protocol(std::uint64_t seed, Work&& work) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    unsigned bits = prime_bits_from_env();
    std::vector<char> first;
    bool have_first = false;
    std::uint64_t p1 = 0;
    bool disagree = false;
    for (int att = 0; att < 16 && !disagree; ++att) {
        std::uint64_t p = random_prime(rng, bits);
        if (have_first && p == p1) continue;
        try {
            PrimeField fp{p};
            auto b = work(fp);
            if (!have_first) {
                first = std::move(b);
                have_first = true;
                p1 = p;
                continue;
            }
            if (b == first) return first;
            disagree = true;
        } catch (const TruncationTooSmall&) {
            throw;
        } catch (const Error&) {
            continue;
        }
    }
    RatField fq;
    return work(fq);
}

BoxedValueSet assemble_box(unsigned r, const ValueVector& gamma, std::vector<char> bits) {
    try {
        return BoxedValueSet::from_members(r, ValueVector(r, 0), gamma, gamma, std::move(bits));
    } catch (const Error& e) {
        throw TruncationTooSmall(std::string("value set box could not be certified: ") + e.what());
    }
}

ValuedModule make_base(const BranchList& params, const ValueVector& gamma_ref, unsigned extra) {
    if (params.empty()) throw Error("module needs at least one branch");
    if (gamma_ref.size() != params.size()) throw Error("gamma_ref dimension mismatch");
    for (auto g : gamma_ref)
        if (g < 0) throw Error("gamma_ref must be componentwise nonnegative");
    ValuedModule m;
    m.params = params;
    m.gamma_ref = gamma_ref;
    const size_t r = params.size();
    std::vector<long long> vx(r), vy(r), cut(r);
    long long maxcut = 0;
    for (size_t i = 0; i < r; ++i) {
        auto [ox, oy] = plane_orders(params[i]);
        vx[i] = ox;
        vy[i] = oy;
        cut[i] = gamma_ref[i] + extra;
        maxcut = std::max(maxcut, cut[i]);
    }
    m.T = static_cast<unsigned>(maxcut + 4);
    for (unsigned a = 0;; ++a) {
        bool a_ok = false;
        for (size_t i = 0; i < r; ++i)
            if (sat_mul(vx[i], a) <= cut[i]) a_ok = true;
        if (!a_ok) break;
        for (unsigned b = 0;; ++b) {
            bool ok = false;
            for (size_t i = 0; i < r; ++i)
                if (sat_mul(vx[i], a) + sat_mul(vy[i], b) <= cut[i]) ok = true;
            if (!ok) break;
            m.multipliers.emplace_back(a, b);
        }
    }
    return m;
}

std::vector<Series<Rat>> plane_series_all(const BranchList& params, unsigned T, bool want_x) {
    RatField q;
    std::vector<Series<Rat>> out;
    out.reserve(params.size());
    for (const auto& p : params)
        out.push_back(want_x ? plane_x_series(q, p, T) : plane_y_series(q, p, T));
    return out;
}

} // namespace

CurveData curve_data(const BranchList& branches) {
    if (branches.empty()) throw Error("curve needs at least one branch");
    CurveData cd;
    cd.branches = branches;
    for (const auto& p : branches) cd.chars.push_back(char_data(p));
    cd.inter = pairwise_intersections(branches);
    cd.cs.resize(branches.size());
    for (size_t i = 0; i < branches.size(); ++i) {
        long long v = static_cast<long long>(cd.chars[i].conductor);
        for (size_t j = 0; j < branches.size(); ++j)
            if (j != i) v += static_cast<long long>(cd.inter[i][j]);
        cd.cs[i] = v;
    }
    return cd;
}

ValuedModule module_from_functions(const BranchList& params, const std::vector<BivarPoly>& hs,
                                   const ValueVector& gamma_ref, unsigned extra) {
    auto m = make_base(params, gamma_ref, extra);
    RatField q;
    auto xs = plane_series_all(params, m.T, true);
    auto ys = plane_series_all(params, m.T, false);
    for (const auto& h : hs) {
        SeriesTuple<Rat> tup;
        for (size_t i = 0; i < params.size(); ++i) tup.push_back(poly_eval_series(q, h, xs[i], ys[i]));
        m.generators.push_back(std::move(tup));
    }
    if (m.generators.empty()) throw Error("module needs at least one generator");
    return m;
}

ValuedModule module_from_forms(const BranchList& params,
                               const std::vector<std::pair<BivarPoly, BivarPoly>>& forms,
                               const ValueVector& gamma_ref, unsigned extra) {
    auto m = make_base(params, gamma_ref, extra);
    RatField q;
    auto xs = plane_series_all(params, m.T, true);
    auto ys = plane_series_all(params, m.T, false);
    for (const auto& [A, B] : forms) {
        SeriesTuple<Rat> tup;
        for (size_t i = 0; i < params.size(); ++i) {
            auto part = ser_mul(q, poly_eval_series(q, A, xs[i], ys[i]), ser_t_ddt(q, xs[i]));
            part = ser_add(q, part, ser_mul(q, poly_eval_series(q, B, xs[i], ys[i]), ser_t_ddt(q, ys[i])));
            tup.push_back(std::move(part));
        }
        m.generators.push_back(std::move(tup));
    }
    if (m.generators.empty()) throw Error("module needs at least one generator");
    return m;
}

BoxedValueSet value_set(const ValuedModule& m, std::uint64_t seed) {
    const size_t r = m.params.size();
    if (m.gamma_ref.size() != r) throw Error("gamma_ref dimension mismatch");
    std::vector<unsigned> order(r), cols(r);
    for (size_t i = 0; i < r; ++i) {
        order[i] = static_cast<unsigned>(i);
        if (static_cast<long long>(m.T) < m.gamma_ref[i] + 1)
            throw TruncationTooSmall("module precision below requested box");
        cols[i] = static_cast<unsigned>(m.gamma_ref[i] + 2);
    }
    auto lay = make_layout(order, cols);
    auto bits = two_prime_protocol(seed, [&](const auto& fld) {
        auto rows = build_rows(fld, m, lay);
        return membership_bits(fld, std::move(rows), lay, m.gamma_ref);
    });
    return assemble_box(static_cast<unsigned>(r), m.gamma_ref, std::move(bits));
}

BoxedValueSet kernel_values(const ValuedModule& m, const std::vector<unsigned>& J,
                            std::uint64_t seed) {
    const size_t r = m.params.size();
    if (J.empty()) throw Error("kernel index set is empty");
    std::vector<char> inJ(r, 0);
    for (auto j : J) {
        if (j >= r) throw Error("kernel index out of range");
        if (inJ[j]) throw Error("kernel index repeated");
        inJ[j] = 1;
    }
    std::vector<unsigned> comp;
    for (unsigned i = 0; i < r; ++i)
        if (!inJ[i]) comp.push_back(i);
    if (comp.empty()) throw Error("kernel complement is empty");

    long long b0max = 1;
    for (const auto& p : m.params) {
        auto [ox, oy] = plane_orders(p);
        b0max = std::max(b0max, std::min(ox, oy));
    }
    const long long ngens = static_cast<long long>(m.generators.size());
    const unsigned t_hi = m.T + 1; // J-column budget: coefficients 0..T
    const unsigned t_lo = static_cast<unsigned>(t_hi - b0max);
    ValueVector gamma_c;
    long long maxgc = 0;
    for (auto i : comp) {
        gamma_c.push_back(m.gamma_ref[i]);
        maxgc = std::max(maxgc, m.gamma_ref[i]);
    }
    if (static_cast<long long>(t_lo) < maxgc + b0max * ngens + 1)
        throw TruncationTooSmall("kernel threshold margin not satisfied");

    auto bits_at = [&](const auto& fld, unsigned jbudget) {
        std::vector<unsigned> order, cols;
        for (auto j : J) {
            order.push_back(j);
            cols.push_back(jbudget);
        }
        unsigned jtotal = static_cast<unsigned>(J.size()) * jbudget;
        for (auto i : comp) {
            order.push_back(i);
            cols.push_back(static_cast<unsigned>(m.gamma_ref[i] + 2));
        }
        auto lay = make_layout(order, cols);
        auto rows = build_rows(fld, m, lay);
        auto lead = window_echelon(fld, rows, 0, jtotal);
        // Rows with no lead in the J window vanish there to the budget; their
        // complement parts span the kernel candidates.
        RowsOf<std::decay_t<decltype(fld)>> krows;
        for (size_t i = 0; i < rows.size(); ++i) {
            if (lead[i] != kNoLead) continue;
            std::vector<typename std::decay_t<decltype(fld)>::Elt> nr(rows[i].begin() + jtotal,
                                                                      rows[i].end());
            bool nonzero = false;
            for (const auto& v : nr)
                if (!fld.is_zero(v)) {
                    nonzero = true;
                    break;
                }
            if (nonzero) krows.push_back(std::move(nr));
        }
        std::vector<unsigned> corder(comp.begin(), comp.end());
        std::vector<unsigned> ccols;
        for (auto i : comp) ccols.push_back(static_cast<unsigned>(m.gamma_ref[i] + 2));
        auto clay = make_layout(corder, ccols);
        return membership_bits(fld, std::move(krows), clay, gamma_c);
    };
    auto bits = two_prime_protocol(seed, [&](const auto& fld) {
        auto lo = bits_at(fld, t_lo);
        auto hi = bits_at(fld, t_hi);
        if (lo != hi) {
            if (std::is_same_v<std::decay_t<decltype(fld)>, RatField>)
                throw TruncationTooSmall("kernel vanishing threshold unstable");
            throw Error("kernel vanishing threshold unstable modulo prime");
        }
        return hi;
    });
    return assemble_box(static_cast<unsigned>(comp.size()), gamma_c, std::move(bits));
}

BoxedValueSet semigroup_values(const CurveData& cd, std::uint64_t seed) {
    auto m = module_from_functions(cd.branches, {BivarPoly::constant(1)}, cd.cs, 0);
    return value_set(m, seed);
}

BoxedValueSet kahler_values(const CurveData& cd, std::uint64_t seed) {
    if (cd.branches.size() == 1 && cd.cs[0] == 0) {
        // Smooth branch: t dh realizes exactly the orders >= 1, which the
        // box [0, c_S] = [0,0] cannot certify; return the set directly.
        return BoxedValueSet::from_members(1, {0}, {1}, {1}, {0, 1});
    }
    std::vector<std::pair<BivarPoly, BivarPoly>> forms = {
        {BivarPoly::constant(1), BivarPoly::zero()},
        {BivarPoly::zero(), BivarPoly::constant(1)},
    };
    auto m = module_from_forms(cd.branches, forms, cd.cs, 0);
    return value_set(m, seed);
}

BoxedValueSet jacobian_values(const CurveData& cd, const BivarPoly& f, std::uint64_t seed) {
    auto fx = bivar_dx(f);
    auto fy = bivar_dy(f);
    const size_t r = cd.branches.size();
    ValueVector gamma(r);
    for (size_t i = 0; i < r; ++i) {
        unsigned probe = static_cast<unsigned>(cd.cs[i] + static_cast<long long>(cd.chars[i].conductor) +
                                               static_cast<long long>(cd.chars[i].beta_bar[0]) + 16);
        auto ox = branch_valuation(cd.branches[i], fx, probe);
        auto oy = branch_valuation(cd.branches[i], fy, probe);
        long long g = kInfVal;
        if (ox) g = std::min(g, static_cast<long long>(*ox));
        if (oy) g = std::min(g, static_cast<long long>(*oy));
        if (g >= kInfVal) throw Error("Jacobian ideal vanishes along a branch");
        gamma[i] = g + cd.cs[i];
    }
    auto m = module_from_functions(cd.branches, {fx, fy}, gamma, 0);
    return value_set(m, seed);
}

BoxedValueSet residue_values_irreducible(const Parametrization& p, std::uint64_t seed) {
    auto chars = char_data(p);
    const long long c = static_cast<long long>(chars.conductor);
    const long long b0 = static_cast<long long>(chars.beta_bar[0]);
    CurveData cd;
    cd.branches = {p};
    cd.chars = {chars};
    cd.inter = {{0}};
    cd.cs = {c + b0 + 1};
    auto lam = kahler_values(cd, seed);
    const long long bound = b0 + c;
    auto in_lambda = [&](long long v) {
        if (v < 0) return false;
        if (v > lam.box_max[0]) return true; // tail certified
        return lam.member({v});
    };
    std::vector<char> bits(static_cast<size_t>(2 * bound + 1), 0);
    for (long long d = -bound; d <= bound; ++d)
        bits[static_cast<size_t>(d + bound)] = !in_lambda(-d);
    auto delta = BoxedValueSet::from_members(1, {-bound}, {bound}, {1}, std::move(bits));
    auto cond = conductor(delta);
    if (cond[0] != 1 - b0)
        throw Error("residue value set contradicts the conductor identity");
    return delta;
}

unsigned kahler_kernel_margin(const CurveData& cd) {
    long long b0max = 1;
    for (const auto& ch : cd.chars) b0max = std::max(b0max, static_cast<long long>(ch.beta_bar[0]));
    return static_cast<unsigned>(3 * b0max + 8);
}

std::uint64_t theta(const CurveData& cd, unsigned i, std::uint64_t seed) {
    const size_t r = cd.branches.size();
    if (i < 1 || i > r) throw Error("theta: branch index out of range");
    if (i == 1) return 0;
    auto lam = kahler_values(cd, seed);
    auto pr_lam = project_r1(lam, i - 1);
    std::vector<std::pair<BivarPoly, BivarPoly>> forms = {
        {BivarPoly::constant(1), BivarPoly::zero()},
        {BivarPoly::zero(), BivarPoly::constant(1)},
    };
    auto big = module_from_forms(cd.branches, forms, cd.cs, kahler_kernel_margin(cd));
    std::vector<unsigned> J;
    for (unsigned j = 0; j + 1 < i; ++j) J.push_back(j);
    auto ker = kernel_values(big, J, seed);
    auto pr_ker = project_r1(ker, 0);
    return count_difference_r1(pr_lam, pr_ker);
}

Mat<Rat> span_matrix(const ValuedModule& m, const std::vector<unsigned>& cols) {
    if (cols.size() != m.params.size()) throw Error("span_matrix: column budget dimension mismatch");
    std::vector<unsigned> order(m.params.size());
    std::iota(order.begin(), order.end(), 0u);
    auto lay = make_layout(order, cols);
    RatField q;
    auto rows = build_rows(q, m, lay);
    Mat<Rat> out(rows.size(), lay.total);
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < lay.total; ++j) out(i, j) = rows[i][j];
    return out;
}

} // namespace curvelab
