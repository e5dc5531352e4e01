#include "gausszeros/divided_differences.hpp"

#include "gausszeros/errors.hpp"

#include <cmath>

namespace gausszeros {

Configuration snap_configuration(const Configuration& x) {
    Configuration out = x;
    for (std::size_t i = 1; i < out.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (out[i] != out[j] && std::abs(out[i] - out[j]) < kSnapDistance) {
                out[i] = out[j];
                break;
            }
    return out;
}

namespace {

template <class T>
std::vector<int> mult_t(const std::vector<T>& x) {
    std::vector<int> c(x.size(), 0);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (x[j] == x[i]) ++c[i];
    return c;
}

template <class T>
std::vector<T> to_t(const Configuration& x) {
    return std::vector<T>(x.begin(), x.end());
}

}  // namespace

std::vector<int> multiplicities(const Configuration& x) { return mult_t(x); }

template <class T>
DenseMatrix<T> newton_matrix_t(const std::vector<T>& x) {
    const std::size_t k = x.size();
    const auto c = mult_t(x);
    DenseMatrix<T> m(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        // Taylor coefficients at x_i of P^j in u = X - x_i, built factor by factor
        std::vector<T> q{T(1)};
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t ci = static_cast<std::size_t>(c[i]);
            m(i, j) = ci < q.size() ? q[ci] : T(0);
            const T shift = x[i] - x[j];
            std::vector<T> nq(q.size() + 1, T(0));
            for (std::size_t d = 0; d < q.size(); ++d) {
                nq[d] += shift * q[d];
                nq[d + 1] += q[d];
            }
            q.swap(nq);
        }
    }
    return m;
}

DenseMatrix<double> newton_matrix(const Configuration& x) {
    return convert<double>(newton_matrix_t(to_t<Extended>(snap_configuration(x))));
}

template <class T>
std::vector<T> divided_diff_vector_t(const std::vector<T>& x, const std::vector<T>& evals) {
    if (evals.size() != x.size())
        throw ConfigError("divided_diff_vector: evals and configuration lengths differ");
    const auto m = newton_matrix_t(x);
    DenseMatrix<T> b(x.size(), 1);
    for (std::size_t i = 0; i < x.size(); ++i) b(i, 0) = evals[i];
    forward_solve(m, b);
    return b.data;
}

std::vector<double> divided_diff_vector(const Configuration& x, const std::vector<double>& evals) {
    const auto r = divided_diff_vector_t(to_t<Extended>(snap_configuration(x)), to_t<Extended>(evals));
    return std::vector<double>(r.begin(), r.end());
}

template <class T>
DenseMatrix<T> double_divided_diff_matrix_t(const CorrelationModel& model, const std::vector<T>& x,
                                            const std::vector<T>& y, bool rows_first) {
    const std::size_t k = x.size(), l = y.size();
    const auto cx = mult_t(x), cy = mult_t(y);
    int top = 0;
    for (int a : cx)
        for (int b : cy) top = std::max(top, a + b);
    model.require_order(top);
    // k + l - 2 is the order the bottom-right entry genuinely needs
    model.require_order(static_cast<int>(k + l) - 2);

    std::vector<T> fact(top + 1, T(1));
    for (int i = 1; i <= top; ++i) fact[i] = fact[i - 1] * i;
    std::vector<T> buf(top + 1);
    DenseMatrix<T> c(k, l);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < l; ++j) {
            const int order = cx[i] + cy[j];
            model.derivs(T(y[j] - x[i]), order, buf.data());
            const T v = buf[order] / (fact[cx[i]] * fact[cy[j]]);
            c(i, j) = cx[i] % 2 ? -v : v;
        }
    const auto mx = newton_matrix_t(x);
    const auto my = newton_matrix_t(y);
    if (rows_first) {
        forward_solve(mx, c);              // M(x)^{-1} C
        auto t = transpose(c);
        forward_solve(my, t);              // M(y)^{-1} (M(x)^{-1} C)^T
        return transpose(t);
    }
    auto t = transpose(c);
    forward_solve(my, t);                  // M(y)^{-1} C^T
    auto d = transpose(t);                 // C M(y)^{-T}
    forward_solve(mx, d);
    return d;
}

DenseMatrix<double> double_divided_diff_matrix(const CorrelationModel& model, const Configuration& x,
                                               const Configuration& y, bool rows_first) {
    return convert<double>(double_divided_diff_matrix_t(model, to_t<Extended>(snap_configuration(x)),
                                                        to_t<Extended>(snap_configuration(y)),
                                                        rows_first));
}

double double_divided_diff(const CorrelationModel& model, const Configuration& x,
                           const Configuration& y) {
    const auto d = double_divided_diff_matrix(model, x, y);
    return d(x.size() - 1, y.size() - 1);
}

template DenseMatrix<double> newton_matrix_t(const std::vector<double>&);
template DenseMatrix<Extended> newton_matrix_t(const std::vector<Extended>&);
template std::vector<double> divided_diff_vector_t(const std::vector<double>&, const std::vector<double>&);
template std::vector<Extended> divided_diff_vector_t(const std::vector<Extended>&,
                                                     const std::vector<Extended>&);
template DenseMatrix<double> double_divided_diff_matrix_t(const CorrelationModel&,
                                                          const std::vector<double>&,
                                                          const std::vector<double>&, bool);
template DenseMatrix<Extended> double_divided_diff_matrix_t(const CorrelationModel&,
                                                            const std::vector<Extended>&,
                                                            const std::vector<Extended>&, bool);

}  // namespace gausszeros
