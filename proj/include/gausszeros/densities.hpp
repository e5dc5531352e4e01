#pragma once

#include "gausszeros/conditioning.hpp"

namespace gausszeros {

struct DensityResult {
    double rho = 0.0;
    double d_value = 0.0;
    double n_value = 0.0;
    double n_std_error = 0.0;  // zero when N came from a closed form
    IndexPartition partition_used;
    double vandermonde_factor = 1.0;  // prod over blocks, unordered pairs inside, of |x_i - x_j|
    Extended rho_extended = 0;        // rho before rounding to double
};

struct VanishingConstant {
    double value = 0.0;
    double std_error = 0.0;
    IndexPartition partition;
};

struct ClusteringRatio {
    double ratio = 1.0;
    double bound = 0.0;
    double eta = 0.0;
    Extended deviation = 0;  // ratio - 1 at extended precision
};

inline constexpr int kMaxPoints = 6;

// Density through the partition I_1(x); falls back to the one-block
// partition if I_1(x) is degenerate.
DensityResult rho_k(const CorrelationModel& model, const Configuration& x,
                    const MonteCarloSpec& mc = {});
DensityResult rho_with_partition(const CorrelationModel& model, const Configuration& x,
                                 const IndexPartition& partition, const MonteCarloSpec& mc = {});

VanishingConstant vanishing_constant(const CorrelationModel& model, const Configuration& y,
                                     const MonteCarloSpec& mc = {});

ClusteringRatio clustering_ratio(const CorrelationModel& model, const Configuration& x,
                                 const IndexPartition& partition, const MonteCarloSpec& mc = {});

}  // namespace gausszeros
