#pragma once

#include "gausszeros/correlation.hpp"
#include "gausszeros/extended.hpp"

#include <vector>

namespace gausszeros {

using Configuration = std::vector<double>;

// Points closer than this are treated as equal.
inline constexpr double kSnapDistance = 1e-10;

// Copies x with every point within kSnapDistance of an earlier point
// replaced by that earlier point.
Configuration snap_configuration(const Configuration& x);

// c_i = number of j < i with x_j == x_i.
std::vector<int> multiplicities(const Configuration& x);

// M_ij = (P^{j-1})^{(c_i)}(x_i) / c_i!, P^j = prod_{l<=j} (X - x_l).
template <class T>
DenseMatrix<T> newton_matrix_t(const std::vector<T>& x);
DenseMatrix<double> newton_matrix(const Configuration& x);

// Solves M(x) d = evals by forward substitution. evals_i = f^{(c_i)}(x_i) / c_i!.
template <class T>
std::vector<T> divided_diff_vector_t(const std::vector<T>& x, const std::vector<T>& evals);
std::vector<double> divided_diff_vector(const Configuration& x, const std::vector<double>& evals);

// Entry (a, b) is [kappa]_{(a+1, b+1)}(x_1..x_{a+1}, y_1..y_{b+1}).
// rows_first selects the order of the two triangular solves.
template <class T>
DenseMatrix<T> double_divided_diff_matrix_t(const CorrelationModel& model, const std::vector<T>& x,
                                            const std::vector<T>& y, bool rows_first = true);
DenseMatrix<double> double_divided_diff_matrix(const CorrelationModel& model, const Configuration& x,
                                               const Configuration& y, bool rows_first = true);
double double_divided_diff(const CorrelationModel& model, const Configuration& x,
                           const Configuration& y);

}  // namespace gausszeros
