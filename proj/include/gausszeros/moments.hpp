#pragma once

#include "gausszeros/conditioning.hpp"
#include "gausszeros/pair_correlation.hpp"
#include "gausszeros/partitions.hpp"

namespace gausszeros {

// F_I at one point per block: sum over B in S(I) of (-1/pi)^{n-|B|} times the
// |I_B|-point density at the points of the blocks inside B (1 when B is empty).
double moment_integrand_F(const CorrelationModel& model, const IndexPartition& partition,
                          const std::vector<double>& block_points, const MonteCarloSpec& mc = {});

// Leading pair-partition term: sum over pair partitions of the product of
// predicted covariances. Zero for odd p.
double predicted_central_moment(const CorrelationModel& model,
                                const std::vector<TestFunction>& test_functions, double R,
                                const QuadratureSpec& quad = {});

}  // namespace gausszeros
