#pragma once

#include <cstdint>
#include <vector>

#include "curvelab/primefield.hpp"
#include "curvelab/rational.hpp"

namespace curvelab {

template <class T>
struct Mat {
    size_t rows = 0, cols = 0;
    std::vector<T> a;

    Mat() = default;
    Mat(size_t r, size_t c) : rows(r), cols(c), a(r * c) {}
    T& operator()(size_t i, size_t j) { return a[i * cols + j]; }
    const T& operator()(size_t i, size_t j) const { return a[i * cols + j]; }
};

// Row-echelon rank by Gaussian elimination over a field object.
template <class F>
size_t rank_field(const F& f, Mat<typename F::Elt> m) {
    size_t r = 0;
    for (size_t col = 0; col < m.cols && r < m.rows; ++col) {
        size_t piv = r;
        while (piv < m.rows && f.is_zero(m(piv, col))) ++piv;
        if (piv == m.rows) continue;
        if (piv != r)
            for (size_t j = col; j < m.cols; ++j) std::swap(m(r, j), m(piv, j));
        auto inv = f.inv(m(r, col));
        for (size_t i = r + 1; i < m.rows; ++i) {
            if (f.is_zero(m(i, col))) continue;
            auto factor = f.mul(m(i, col), inv);
            for (size_t j = col; j < m.cols; ++j) m(i, j) = f.sub(m(i, j), f.mul(factor, m(r, j)));
        }
        ++r;
    }
    return r;
}

size_t rank_rational(const Mat<Rat>& m);

// Rank of a rational matrix: reductions modulo two independent random primes,
// with escalation to exact arithmetic when they disagree.
size_t rank_two_prime(const Mat<Rat>& m, uint64_t seed);

} // namespace curvelab
