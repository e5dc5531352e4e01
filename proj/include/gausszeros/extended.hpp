#pragma once

// Extended precision scalar and a few small dense kernels that work with it.
// Eigen's decompositions do not instantiate cleanly for float128, and the
// matrices here never exceed a couple dozen rows.

#include <boost/multiprecision/float128.hpp>

#include <cmath>
#include <cstddef>
#include <vector>

namespace gausszeros {

using Extended = boost::multiprecision::float128;

template <class T>
struct DenseMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<T> data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, T(0)) {}

    T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// Cholesky of a symmetric positive semi-definite matrix. Pivots at or below
// tol * max diagonal are treated as zero and their column is cleared, so the
// factor of a singular PSD matrix is still usable for sampling.
// Returns the number of nonzero pivots.
template <class T>
std::size_t psd_cholesky(const DenseMatrix<T>& a, DenseMatrix<T>& l, T tol) {
    using std::sqrt;
    const std::size_t n = a.rows;
    l = DenseMatrix<T>(n, n);
    T dmax(0);
    for (std::size_t i = 0; i < n; ++i)
        if (a(i, i) > dmax) dmax = a(i, i);
    const T floor = tol * dmax;
    std::size_t rank = 0;
    for (std::size_t j = 0; j < n; ++j) {
        T d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= floor) continue;
        ++rank;
        const T ljj = sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            T s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return rank;
}

// Solves L X = B in place for lower-triangular L with nonzero diagonal.
template <class T>
void forward_solve(const DenseMatrix<T>& l, DenseMatrix<T>& b) {
    const std::size_t n = l.rows;
    for (std::size_t c = 0; c < b.cols; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            T s = b(i, c);
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * b(k, c);
            b(i, c) = s / l(i, i);
        }
    }
}

template <class T>
DenseMatrix<T> transpose(const DenseMatrix<T>& a) {
    DenseMatrix<T> t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

template <class T>
DenseMatrix<T> matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    DenseMatrix<T> c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const T aik = a(i, k);
            if (aik == T(0)) continue;
            for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

template <class To, class From>
DenseMatrix<To> convert(const DenseMatrix<From>& a) {
    DenseMatrix<To> out(a.rows, a.cols);
    for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = static_cast<To>(a.data[i]);
    return out;
}

}  // namespace gausszeros
