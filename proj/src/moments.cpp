#include "gausszeros/moments.hpp"

#include "gausszeros/densities.hpp"
#include "gausszeros/errors.hpp"

#include <boost/math/constants/constants.hpp>

#include <map>

namespace gausszeros {

double moment_integrand_F(const CorrelationModel& model, const IndexPartition& partition,
                          const std::vector<double>& block_points, const MonteCarloSpec& mc) {
    if (block_points.size() != partition.size())
        throw ConfigError("moment_integrand_F: need one point per block");
    const int n = partition.ground_size();
    const double minus_inv_pi = -1.0 / boost::math::constants::pi<double>();
    double total = 0.0;
    for (const auto& b : adapted_subsets(n, partition)) {
        Configuration pts;
        for (std::size_t blk = 0; blk < partition.size(); ++blk) {
            const int first = partition.blocks()[blk].front();
            if (std::find(b.begin(), b.end(), first) != b.end()) pts.push_back(block_points[blk]);
        }
        const double rho = pts.empty() ? 1.0 : rho_k(model, pts, mc).rho;
        total += std::pow(minus_inv_pi, n - static_cast<int>(b.size())) * rho;
    }
    return total;
}

double predicted_central_moment(const CorrelationModel& model,
                                const std::vector<TestFunction>& phis, double R,
                                const QuadratureSpec& quad) {
    const int p = static_cast<int>(phis.size());
    if (p == 0) return 1.0;
    if (p % 2) return 0.0;
    std::map<std::pair<int, int>, double> cache;
    auto cov = [&](int a, int b) {
        const auto key = std::make_pair(std::min(a, b), std::max(a, b));
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        const auto r = predicted_covariance(model, phis[a], phis[b], R, quad);
        if (!r.converged)
            throw QuadratureNotConverged("predicted_central_moment: covariance quadrature did not converge");
        cache[key] = r.value;
        return r.value;
    };
    double total = 0.0;
    for (const auto& pp : enumerate_pair_partitions(p)) {
        double prod = 1.0;
        for (const auto& blk : pp.blocks()) prod *= cov(blk[0], blk[1]);
        total += prod;
    }
    return total;
}

}  // namespace gausszeros
