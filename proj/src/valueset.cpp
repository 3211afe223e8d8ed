#include <algorithm>
#include <bit>
#include <functional>
#include <sstream>

#include "curvelab/errors.hpp"
#include "curvelab/valueset.hpp"

namespace curvelab {

bool vv_leq(const ValueVector& a, const ValueVector& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

ValueVector vv_min(const ValueVector& a, const ValueVector& b) {
    ValueVector m(a.size());
    for (size_t i = 0; i < a.size(); ++i) m[i] = std::min(a[i], b[i]);
    return m;
}

ValueVector vv_add(const ValueVector& a, const ValueVector& b) {
    ValueVector m(a.size());
    for (size_t i = 0; i < a.size(); ++i) m[i] = a[i] + b[i];
    return m;
}

std::string vv_to_string(const ValueVector& a) {
    std::ostringstream os;
    os << '(';
    for (size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
    os << ')';
    return os.str();
}

namespace {

// Lex iteration (first coordinate most significant) over [lo, hi]; the
// callback returns false to stop early.
void scan_box(const ValueVector& lo, const ValueVector& hi, const std::function<bool(const ValueVector&)>& fn) {
    size_t r = lo.size();
    for (size_t i = 0; i < r; ++i)
        if (lo[i] > hi[i]) return;
    ValueVector cur = lo;
    for (;;) {
        if (!fn(cur)) return;
        size_t i = r;
        for (;;) {
            if (i == 0) return;
            --i;
            if (cur[i] < hi[i]) {
                ++cur[i];
                for (size_t j = i + 1; j < r; ++j) cur[j] = lo[j];
                break;
            }
        }
    }
}

} // namespace

size_t BoxedValueSet::volume() const {
    size_t v = 1;
    for (unsigned i = 0; i < r; ++i) v *= static_cast<size_t>(box_max[i] - box_min[i] + 1);
    return v;
}

size_t BoxedValueSet::index(const ValueVector& a) const {
    size_t idx = 0;
    for (unsigned i = 0; i < r; ++i)
        idx = idx * static_cast<size_t>(box_max[i] - box_min[i] + 1) + static_cast<size_t>(a[i] - box_min[i]);
    return idx;
}

bool BoxedValueSet::in_box(const ValueVector& a) const {
    for (unsigned i = 0; i < r; ++i)
        if (a[i] < box_min[i] || a[i] > box_max[i]) return false;
    return true;
}

bool BoxedValueSet::member(const ValueVector& a) const { return bits[index(a)] != 0; }

bool BoxedValueSet::contains(const ValueVector& a) const {
    if (vv_leq(tail_conductor, a)) return true;
    if (in_box(a)) return member(a);
    throw OutOfBox("membership query outside certified region at " + vv_to_string(a));
}

ValueVector BoxedValueSet::min_element() const {
    ValueVector m;
    bool any = false;
    scan_box(box_min, box_max, [&](const ValueVector& a) {
        if (!member(a)) return true;
        if (!any) {
            m = a;
            any = true;
        } else {
            m = vv_min(m, a);
        }
        return true;
    });
    if (!any) throw NotInSet("value set is empty on its box");
    if (!member(m)) throw Error("value set has no minimum element (not min-closed)");
    return m;
}

uint64_t BoxedValueSet::box_member_count() const {
    uint64_t n = 0;
    for (char b : bits) n += (b != 0);
    return n;
}

BoxedValueSet BoxedValueSet::from_members(unsigned r, ValueVector box_min, ValueVector box_max,
                                          ValueVector tail_conductor, std::vector<char> bits) {
    BoxedValueSet e;
    e.r = r;
    e.box_min = std::move(box_min);
    e.box_max = std::move(box_max);
    e.tail_conductor = std::move(tail_conductor);
    e.bits = std::move(bits);
    if (e.box_min.size() != r || e.box_max.size() != r || e.tail_conductor.size() != r)
        throw Error("value set dimension mismatch");
    for (unsigned i = 0; i < r; ++i) {
        if (e.box_min[i] > e.box_max[i]) throw Error("empty value set box");
        if (e.tail_conductor[i] > e.box_max[i]) throw Error("tail certificate outside the box");
    }
    if (e.bits.size() != e.volume()) throw Error("value set bitmap size mismatch");
    ValueVector lo(r);
    for (unsigned i = 0; i < r; ++i) lo[i] = std::max(e.tail_conductor[i], e.box_min[i]);
    scan_box(lo, e.box_max, [&](const ValueVector& a) {
        if (!e.member(a)) throw Error("tail certificate violated at " + vv_to_string(a));
        return true;
    });
    return e;
}

BoxedValueSet BoxedValueSet::up_set(ValueVector box_min, ValueVector box_max, const ValueVector& corner) {
    unsigned r = static_cast<unsigned>(corner.size());
    BoxedValueSet e;
    e.r = r;
    e.box_min = std::move(box_min);
    e.box_max = std::move(box_max);
    e.tail_conductor = corner;
    size_t vol = 1;
    for (unsigned i = 0; i < r; ++i) vol *= static_cast<size_t>(e.box_max[i] - e.box_min[i] + 1);
    e.bits.assign(vol, 0);
    scan_box(e.box_min, e.box_max, [&](const ValueVector& a) {
        if (vv_leq(corner, a)) e.bits[e.index(a)] = 1;
        return true;
    });
    return BoxedValueSet::from_members(r, e.box_min, e.box_max, e.tail_conductor, e.bits);
}

FiberClass fiber(const BoxedValueSet& e, const ValueVector& alpha, const std::vector<unsigned>& J) {
    if (!e.in_box(alpha)) throw OutOfBox("fiber base point outside box " + vv_to_string(alpha));
    std::vector<char> in_j(e.r, 0);
    for (unsigned j : J) {
        if (j >= e.r) throw Error("fiber index out of range");
        in_j[j] = 1;
    }
    // Infinite: some member of the closed fiber reaches the tail in every
    // complementary coordinate.
    bool infinite = false;
    ValueVector lo = alpha, hi = e.box_max;
    for (unsigned i = 0; i < e.r; ++i)
        if (in_j[i]) hi[i] = alpha[i];
    scan_box(lo, hi, [&](const ValueVector& b) {
        if (!e.member(b)) return true;
        for (unsigned i = 0; i < e.r; ++i)
            if (!in_j[i] && b[i] < e.tail_conductor[i]) return true;
        infinite = true;
        return false;
    });
    if (infinite) return FiberClass::Infinite;
    bool nonempty = false;
    ValueVector lo2 = alpha;
    for (unsigned i = 0; i < e.r; ++i)
        if (!in_j[i]) lo2[i] = alpha[i] + 1;
    scan_box(lo2, hi, [&](const ValueVector& b) {
        if (e.member(b)) {
            nonempty = true;
            return false;
        }
        return true;
    });
    return nonempty ? FiberClass::Nonempty : FiberClass::Empty;
}

ValueVector conductor(const BoxedValueSet& e) {
    ValueVector g(e.r);
    for (unsigned i = 0; i < e.r; ++i) g[i] = std::max(e.tail_conductor[i], e.box_min[i]);
    // Descend one coordinate at a time; each step only needs the new slab.
    bool progress = true;
    while (progress) {
        progress = false;
        for (unsigned i = 0; i < e.r; ++i) {
            while (g[i] > e.box_min[i]) {
                ValueVector lo = g, hi = e.box_max;
                lo[i] = g[i] - 1;
                hi[i] = g[i] - 1;
                bool ok = true;
                scan_box(lo, hi, [&](const ValueVector& b) {
                    if (!e.member(b)) {
                        ok = false;
                        return false;
                    }
                    return true;
                });
                if (!ok) break;
                --g[i];
                progress = true;
            }
        }
    }
    return g;
}

MaximalsReport maximals(const BoxedValueSet& e) {
    MaximalsReport rep;
    if (e.r == 1) return rep; // cofinite subsets of N have no maximal points
    size_t vol = e.volume();
    unsigned r = e.r;
    unsigned nsub = (1u << r) - 2; // proper nonempty subsets 1..2^r-2
    // T_J(a) = #{ b member : b_j = a_j for j in J, b_i > a_i otherwise }
    std::vector<std::vector<uint32_t>> tj(nsub + 1);
    std::vector<long long> width(r), stride(r);
    for (unsigned i = 0; i < r; ++i) width[i] = e.box_max[i] - e.box_min[i] + 1;
    stride[r - 1] = 1;
    for (unsigned i = r - 1; i > 0; --i) stride[i - 1] = stride[i] * width[i];
    for (unsigned mask = 1; mask <= nsub; ++mask) {
        std::vector<uint32_t> cnt(vol);
        for (size_t k = 0; k < vol; ++k) cnt[k] = e.bits[k] ? 1 : 0;
        for (unsigned i = 0; i < r; ++i) {
            if (mask & (1u << i)) continue; // pinned coordinate
            // exclusive suffix sums along axis i
            size_t lines = vol / static_cast<size_t>(width[i]);
            for (size_t line = 0; line < lines; ++line) {
                // decompose line index into the non-i coordinates
                size_t rem = line, base = 0;
                for (unsigned j = 0; j < r; ++j) {
                    if (j == i) continue;
                    size_t w = static_cast<size_t>(width[j]);
                    size_t pos = rem % w;
                    rem /= w;
                    base += pos * static_cast<size_t>(stride[j]);
                }
                uint32_t running = 0;
                for (long long a = width[i] - 1; a >= 0; --a) {
                    size_t idx = base + static_cast<size_t>(a) * static_cast<size_t>(stride[i]);
                    uint32_t tmp = cnt[idx];
                    cnt[idx] = running;
                    running += tmp;
                }
            }
        }
        tj[mask] = std::move(cnt);
    }
    scan_box(e.box_min, e.box_max, [&](const ValueVector& a) {
        for (unsigned i = 0; i < r; ++i)
            if (a[i] >= e.tail_conductor[i]) return true; // tail kills a fiber
        if (!e.member(a)) return true;
        size_t idx = e.index(a);
        bool maximal = true;
        for (unsigned i = 0; i < r && maximal; ++i)
            if (tj[1u << i][idx]) maximal = false;
        if (!maximal) return true;
        rep.maximals.push_back(a);
        // Absolute: every proper fiber empty.  Relative: every fiber pinning
        // two or more coordinates nonempty.  For r = 2 both lists coincide
        // with the maximals (there are no proper pins of size >= 2).
        bool absolute = true, relative = true;
        for (unsigned mask = 1; mask <= nsub; ++mask) {
            bool occupied = tj[mask][idx] != 0;
            if (occupied) absolute = false;
            if (std::popcount(mask) >= 2 && !occupied) relative = false;
        }
        if (relative) rep.relative_maximals.push_back(a);
        if (absolute) rep.absolute_maximals.push_back(a);
        return true;
    });
    return rep;
}

uint64_t chain_distance(const BoxedValueSet& e, const ValueVector& a, const ValueVector& b) {
    if (!e.contains(a)) throw NotInSet("chain start not in set " + vv_to_string(a));
    if (!e.contains(b)) throw NotInSet("chain end not in set " + vv_to_string(b));
    if (!vv_leq(a, b)) throw NotInSet("chain endpoints not comparable");
    ValueVector cur = a;
    uint64_t dist = 0;
    while (cur != b) {
        // Lex-first member of (cur, b] is a minimal element of the interval.
        ValueVector next;
        bool found = false;
        scan_box(cur, b, [&](const ValueVector& g) {
            if (g == cur) return true;
            if (e.contains(g)) {
                next = g;
                found = true;
                return false;
            }
            return true;
        });
        if (!found) throw Error("saturated chain lost its endpoint");
        cur = next;
        ++dist;
    }
    return dist;
}

uint64_t distance_diff(const BoxedValueSet& e1, const BoxedValueSet& e2) {
    if (e1.r != e2.r) throw NotASubset("value set dimensions differ");
    scan_box(e2.box_min, e2.box_max, [&](const ValueVector& a) {
        if (e2.member(a) && !e1.contains(a))
            throw NotASubset("containment fails at " + vv_to_string(a));
        return true;
    });
    if (!vv_leq(e1.tail_conductor, e2.tail_conductor)) {
        // e2's tail claim must be visible inside e1's certified region.
        ValueVector lo(e1.r);
        for (unsigned i = 0; i < e1.r; ++i) lo[i] = std::max(e2.tail_conductor[i], e1.box_min[i]);
        scan_box(lo, e1.box_max, [&](const ValueVector& a) {
            if (!e1.contains(a)) throw NotASubset("containment fails on the tail at " + vv_to_string(a));
            return true;
        });
    }
    ValueVector gamma = conductor(e2);
    uint64_t d1 = chain_distance(e1, e1.min_element(), gamma);
    uint64_t d2 = chain_distance(e2, e2.min_element(), gamma);
    if (d1 < d2) throw Error("distance difference came out negative");
    return d1 - d2;
}

uint64_t gh_colength(const BoxedValueSet& e, const ValueVector& gamma, const std::vector<uint64_t>& theta) {
    if (theta.size() != e.r) throw Error("theta list has wrong length");
    if (theta[0] != 0) throw Error("theta[0] must be 0");
    ValueVector c = conductor(e);
    if (!vv_leq(c, gamma)) throw ConductorViolation("gamma " + vv_to_string(gamma) + " below conductor " + vv_to_string(c));
    ValueVector a0 = e.min_element();
    long long total = 0;
    for (unsigned i = 0; i < e.r; ++i) {
        std::vector<char> seen(static_cast<size_t>(e.box_max[i] - e.box_min[i] + 1), 0);
        scan_box(e.box_min, e.box_max, [&](const ValueVector& b) {
            if (e.member(b)) seen[static_cast<size_t>(b[i] - e.box_min[i])] = 1;
            return true;
        });
        long long gaps = 0;
        for (long long v = a0[i]; v < e.tail_conductor[i]; ++v)
            if (!seen[static_cast<size_t>(v - e.box_min[i])]) ++gaps;
        total += gamma[i] - a0[i] - gaps - static_cast<long long>(theta[i]);
    }
    if (total < 0) throw Error("colength formula came out negative");
    return static_cast<uint64_t>(total);
}

BoxedValueSet with_member(const BoxedValueSet& e, const ValueVector& a) {
    if (!e.in_box(a)) throw OutOfBox("new member outside box " + vv_to_string(a));
    BoxedValueSet out = e;
    out.bits[out.index(a)] = 1;
    return out;
}

BoxedValueSet project_r1(const BoxedValueSet& e, unsigned i) {
    if (i >= e.r) throw Error("projection index out of range");
    BoxedValueSet out;
    out.r = 1;
    out.box_min = {e.box_min[i]};
    out.box_max = {e.box_max[i]};
    out.tail_conductor = {e.tail_conductor[i]};
    out.bits.assign(static_cast<size_t>(e.box_max[i] - e.box_min[i] + 1), 0);
    scan_box(e.box_min, e.box_max, [&](const ValueVector& b) {
        if (e.member(b)) out.bits[static_cast<size_t>(b[i] - e.box_min[i])] = 1;
        return true;
    });
    // Values >= the tail are hit by tail points even when the box misses them.
    for (long long v = e.tail_conductor[i]; v <= e.box_max[i]; ++v)
        out.bits[static_cast<size_t>(v - e.box_min[i])] = 1;
    return BoxedValueSet::from_members(1, out.box_min, out.box_max, out.tail_conductor, out.bits);
}

namespace {

bool r1_contains(const BoxedValueSet& e, long long v) {
    if (v >= e.tail_conductor[0]) return true;
    if (v < e.box_min[0]) return false;
    if (v > e.box_max[0]) return true; // box_max >= tail
    return e.bits[static_cast<size_t>(v - e.box_min[0])] != 0;
}

} // namespace

uint64_t count_difference_r1(const BoxedValueSet& a, const BoxedValueSet& b) {
    if (a.r != 1 || b.r != 1) throw Error("count_difference_r1 needs r=1 sets");
    long long lo = std::min(a.box_min[0], b.box_min[0]);
    long long hi = std::max(a.box_max[0], b.box_max[0]);
    uint64_t n = 0;
    for (long long v = lo; v <= hi; ++v)
        if (r1_contains(a, v) && !r1_contains(b, v)) ++n;
    return n;
}

bool same_members(const BoxedValueSet& a, const BoxedValueSet& b) {
    return a.r == b.r && a.box_min == b.box_min && a.box_max == b.box_max &&
           a.tail_conductor == b.tail_conductor && a.bits == b.bits;
}

std::string valueset_to_json(const BoxedValueSet& e) {
    std::ostringstream os;
    auto vec = [&](const ValueVector& v) {
        os << '[';
        for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
        os << ']';
    };
    os << "{\"r\":" << e.r << ",\"box_min\":";
    vec(e.box_min);
    os << ",\"box_max\":";
    vec(e.box_max);
    os << ",\"tail_conductor\":";
    vec(e.tail_conductor);
    os << ",\"members\":[";
    bool first = true;
    scan_box(e.box_min, e.box_max, [&](const ValueVector& a) {
        if (e.member(a)) {
            if (!first) os << ',';
            first = false;
            vec(a);
        }
        return true;
    });
    os << "]}";
    return os.str();
}

} // namespace curvelab
