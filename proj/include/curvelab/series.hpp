#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "curvelab/errors.hpp"
#include "curvelab/primefield.hpp"
#include "curvelab/rational.hpp"

namespace curvelab {

// Power series in one variable known exactly for exponents <= trunc.
// An order query that runs off the end reports AboveTruncation (nullopt)
// rather than guessing; arithmetic results carry the min of the operand
// truncations.
template <class E>
struct Series {
    unsigned trunc = 0;
    std::vector<E> c; // dense, size trunc+1

    static Series zero(unsigned trunc, const E& z) {
        Series s;
        s.trunc = trunc;
        s.c.assign(trunc + 1, z);
        return s;
    }
};

using TruncSeries = Series<Rat>;

template <class F>
Series<typename F::Elt> ser_zero(const F& f, unsigned trunc) {
    return Series<typename F::Elt>::zero(trunc, f.zero());
}

template <class F>
Series<typename F::Elt> ser_monomial(const F& f, unsigned trunc, unsigned exp, const typename F::Elt& v) {
    auto s = ser_zero(f, trunc);
    if (exp <= trunc) s.c[exp] = v;
    return s;
}

template <class F>
bool ser_is_zero(const F& f, const Series<typename F::Elt>& a) {
    for (const auto& x : a.c)
        if (!f.is_zero(x)) return false;
    return true;
}

// First exponent with nonzero coefficient; nullopt = AboveTruncation.
template <class F>
std::optional<unsigned> ser_order(const F& f, const Series<typename F::Elt>& a) {
    for (unsigned i = 0; i < a.c.size(); ++i)
        if (!f.is_zero(a.c[i])) return i;
    return std::nullopt;
}

template <class F>
Series<typename F::Elt> ser_add(const F& f, const Series<typename F::Elt>& a, const Series<typename F::Elt>& b) {
    unsigned t = std::min(a.trunc, b.trunc);
    auto r = ser_zero(f, t);
    for (unsigned i = 0; i <= t; ++i) r.c[i] = f.add(a.c[i], b.c[i]);
    return r;
}

template <class F>
Series<typename F::Elt> ser_sub(const F& f, const Series<typename F::Elt>& a, const Series<typename F::Elt>& b) {
    unsigned t = std::min(a.trunc, b.trunc);
    auto r = ser_zero(f, t);
    for (unsigned i = 0; i <= t; ++i) r.c[i] = f.sub(a.c[i], b.c[i]);
    return r;
}

template <class F>
Series<typename F::Elt> ser_scale(const F& f, const typename F::Elt& s, const Series<typename F::Elt>& a) {
    auto r = a;
    for (auto& x : r.c) x = f.mul(s, x);
    return r;
}

template <class F>
Series<typename F::Elt> ser_mul(const F& f, const Series<typename F::Elt>& a, const Series<typename F::Elt>& b) {
    unsigned t = std::min(a.trunc, b.trunc);
    auto r = ser_zero(f, t);
    for (unsigned i = 0; i <= t && i < a.c.size(); ++i) {
        if (f.is_zero(a.c[i])) continue;
        unsigned jmax = t - i;
        for (unsigned j = 0; j <= jmax && j < b.c.size(); ++j) {
            if (f.is_zero(b.c[j])) continue;
            r.c[i + j] = f.add(r.c[i + j], f.mul(a.c[i], b.c[j]));
        }
    }
    return r;
}

// a * t^k, keeping the same truncation window.
template <class F>
Series<typename F::Elt> ser_shift(const F& f, const Series<typename F::Elt>& a, unsigned k) {
    auto r = ser_zero(f, a.trunc);
    for (unsigned i = 0; i + k <= a.trunc && i < a.c.size(); ++i) r.c[i + k] = a.c[i];
    return r;
}

// Inverse of a unit (nonzero constant term), by the triangular recurrence.
template <class F>
Series<typename F::Elt> ser_inverse_unit(const F& f, const Series<typename F::Elt>& a) {
    if (f.is_zero(a.c[0])) throw Error("series inverse: not a unit");
    auto r = ser_zero(f, a.trunc);
    auto c0inv = f.inv(a.c[0]);
    r.c[0] = c0inv;
    for (unsigned k = 1; k <= a.trunc; ++k) {
        auto acc = f.zero();
        for (unsigned j = 1; j <= k && j < a.c.size(); ++j)
            acc = f.add(acc, f.mul(a.c[j], r.c[k - j]));
        r.c[k] = f.neg(f.mul(c0inv, acc));
    }
    return r;
}

// Derivative followed by multiplication with t: d/dt then *t keeps exponents.
template <class F>
Series<typename F::Elt> ser_t_ddt(const F& f, const Series<typename F::Elt>& a) {
    auto r = ser_zero(f, a.trunc);
    for (unsigned i = 1; i < a.c.size(); ++i) r.c[i] = f.mul(f.from_long(static_cast<long>(i)), a.c[i]);
    return r;
}

template <class F>
Series<typename F::Elt> ser_truncate(const F& f, const Series<typename F::Elt>& a, unsigned t) {
    auto r = ser_zero(f, t);
    for (unsigned i = 0; i <= t && i < a.c.size(); ++i) r.c[i] = a.c[i];
    return r;
}

template <class E>
using SeriesTuple = std::vector<Series<E>>;

} // namespace curvelab
