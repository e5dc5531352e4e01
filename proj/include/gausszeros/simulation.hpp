#pragma once

#include "gausszeros/correlation.hpp"
#include "gausszeros/pair_correlation.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace gausszeros {

struct SimulationSpec {
    double window_length = 50.0;  // window [0, L]
    double grid_step = 0.02;
    std::uint64_t num_samples = 1000;
    std::uint64_t master_seed = 1;
    double padding_factor = 2.0;
    int threads = 0;  // 0: default_threads()
};

struct ZeroSample {
    std::vector<double> zeros;
    std::uint64_t replicate_seed = 0;  // seed of the FFT pair this replicate came from
    double window_length = 0.0;
};

struct GridPath {
    double step = 0.0;
    std::vector<double> f, df;  // values at 0, step, 2 step, ...
};

struct SamplerInfo {
    std::size_t grid_points = 0;
    std::size_t embedding_size = 0;
    double clipped_mass = 0.0;  // relative
    bool spectral_route = false;  // circulant from spectral masses
    bool dense_fallback = false;
};

// Joint sampler of (f, f') on the grid of spec. Circulant embedding of the
// 2x2 matrix covariance; each complex FFT gives two independent paths.
class PathSampler {
public:
    PathSampler(ModelPtr model, const SimulationSpec& spec);
    ~PathSampler();
    PathSampler(const PathSampler&) = delete;
    PathSampler& operator=(const PathSampler&) = delete;

    // Paths number 2 * pair and 2 * pair + 1.
    std::pair<GridPath, GridPath> sample_pair(std::uint64_t pair_seed) const;
    const SamplerInfo& info() const { return info_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    SamplerInfo info_;
};

// num_samples paths in replicate order.
std::vector<GridPath> sample_paths(ModelPtr model, const SimulationSpec& spec);

// Roots of the cubic Hermite interpolant of (f, f') in [0, window_length].
ZeroSample extract_zeros(const GridPath& path, double window_length);

// num_samples replicates; identical for any thread count.
std::vector<ZeroSample> simulate_zeros(ModelPtr model, const SimulationSpec& spec);

// Sum of phi(z / R) over the zeros; needs R [lo, hi] inside the window.
double linear_statistic(const ZeroSample& sample, const TestFunction& phi, double R);

struct MomentEstimate {
    int order = 0;
    double estimate = 0.0;
    double std_error = 0.0;  // bootstrap standard deviation
    double ci_lo = 0.0, ci_hi = 0.0;
    std::size_t num_samples = 0;
};

// Central moments of <nu_R, phi>, centered at (R/pi) int phi; percentile
// bootstrap CIs at level 0.95 from 1000 seeded resamples.
std::vector<MomentEstimate> moments_from_statistics(const std::vector<double>& stats, double mean,
                                                    const std::vector<int>& orders,
                                                    std::uint64_t seed);
std::vector<MomentEstimate> empirical_moments(ModelPtr model, const SimulationSpec& spec,
                                              const TestFunction& phi, double R,
                                              const std::vector<int>& orders);

struct KPointEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t num_samples = 0;
};

// (2 eps)^{-k} E prod card(Z in [x_i - eps, x_i + eps]). The configuration is
// translated (stationarity) so the leftmost interval starts 0.5 inside the window.
KPointEstimate empirical_k_point(ModelPtr model, const SimulationSpec& spec,
                                 const std::vector<double>& x, double epsilon);

struct CltDiagnostic {
    double ks_distance = 0.0;
    // mean, variance, skewness, kurtosis of the standardized statistic
    std::vector<double> standardized_moments;
    double target_variance = 0.0;  // ||phi||^2
    std::size_t num_samples = 0;
};

CltDiagnostic clt_from_statistics(const std::vector<double>& stats, const TestFunction& phi, double R,
                                  double sigma);
CltDiagnostic clt_diagnostic(ModelPtr model, const SimulationSpec& spec, const TestFunction& phi,
                             double R, double sigma);

}  // namespace gausszeros
