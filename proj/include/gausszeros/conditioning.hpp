#pragma once

#include "gausszeros/correlation.hpp"
#include "gausszeros/divided_differences.hpp"
#include "gausszeros/extended.hpp"
#include "gausszeros/partitions.hpp"

#include <cstdint>

namespace gausszeros {

struct MonteCarloSpec {
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 0x6a09e667f3bcc909ull;
    int threads = 0;  // 0: default_threads()
};

// Relative threshold on det(theta) / prod(theta_ii).
inline constexpr double kDegenerateRelDet = 1e-12;

template <class T>
struct ContextT {
    Configuration x;
    IndexPartition partition;
    DenseMatrix<T> theta, xi, omega, lambda;
    bool has_lambda = false;
    T d_value = T(0);
};

using KacRiceContext = ContextT<double>;

// Theta/Xi/Omega of the divided-difference vectors X_I, Y_I. Coordinates run
// block by block in partition order. Lambda is filled when theta passes the
// degeneracy threshold; with want_lambda a degenerate theta throws.
KacRiceContext assemble_context(const CorrelationModel& model, const Configuration& x,
                                const IndexPartition& partition, bool want_lambda = true);
ContextT<Extended> assemble_context_ext(const CorrelationModel& model, const Configuration& x,
                                        const IndexPartition& partition, bool want_lambda = true);

struct PiResult {
    double value = 0.0;
    double std_error = 0.0;
};

struct PiResultExt {
    Extended value = 0;
    double std_error = 0.0;
};

// E prod |X_i| for X ~ N(0, variance). Closed forms for k <= 2, Monte Carlo
// with a paired control variate beyond.
PiResult pi_k(const DenseMatrix<double>& variance, const MonteCarloSpec& mc = {});
PiResultExt pi_k_ext(const DenseMatrix<Extended>& variance, const MonteCarloSpec& mc = {});

// E prod |X_i|^{e_i}. Exact when all e_i are even (Isserlis) or all equal
// 1 with k <= 2; Monte Carlo otherwise.
PiResultExt abs_moment(const DenseMatrix<Extended>& variance, const std::vector<int>& exponents,
                       const MonteCarloSpec& mc = {});

// k (2k+1)^{(k+1)/2} mu_{2k}^{1/2}
double holder_constant(int k);

// max_ij |U_ij|
double sup_norm(const DenseMatrix<double>& u);

}  // namespace gausszeros
