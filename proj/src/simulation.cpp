#include "gausszeros/simulation.hpp"

#include "gausszeros/errors.hpp"
#include "gausszeros/parallel.hpp"

#include <Eigen/Dense>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>
#include <mutex>
#include <numbers>
#include <random>

namespace gausszeros {

namespace {

constexpr double kEigenFloor = 1e-9;
constexpr double kMaxClippedMass = 1e-6;
constexpr std::size_t kMaxDense = 4000;  // joint dimension 2N
constexpr int kMaxPaddingDoublings = 3;

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void validate(const SimulationSpec& spec) {
    if (!(spec.window_length > 0) || !std::isfinite(spec.window_length))
        throw ConfigError("window length must be positive");
    if (!(spec.grid_step > 0) || spec.grid_step > 0.05)
        throw ConfigError("grid_step must lie in (0, 0.05]");
    if (spec.num_samples < 1) throw ConfigError("num_samples must be >= 1");
    if (!(spec.padding_factor >= 2)) throw ConfigError("padding_factor must be >= 2");
}

std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

struct FftwBuffer {
    fftw_complex* p = nullptr;
    explicit FftwBuffer(std::size_t n) : p(fftw_alloc_complex(n)) {
        if (!p) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(p); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

}  // namespace

struct PathSampler::Impl {
    std::size_t n = 0;  // grid points
    std::size_t m = 0;  // embedding size
    double step = 0.0;
    // circulant route: per frequency the 2x2 factor, row major
    std::vector<std::complex<double>> factor;
    fftw_plan plan = nullptr;
    // dense route
    bool dense = false;
    Eigen::MatrixXd dense_factor;

    ~Impl() {
        if (plan) {
            std::lock_guard<std::mutex> lock(planner_mutex());
            fftw_destroy_plan(plan);
        }
    }

    void make_plan(fftw_complex* buf) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (plan) fftw_destroy_plan(plan);
        plan = fftw_plan_dft_1d(static_cast<int>(m), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!plan) throw EmbeddingFailure("FFTW planning failed");
    }

    // Circulant built from spectral masses of the cells around each Fourier
    // frequency: PSD by construction, covariance exact up to the discretization
    // of the spectral measure (relative error about (delta tau)^2 / 24).
    bool build_spectral(const CorrelationModel& model) {
        const double delta = 2.0 * std::numbers::pi / (double(m) * step);
        if (std::isnan(model.spectral_mass(-delta / 2, delta / 2))) return false;
        factor.assign(4 * m, 0.0);
        double total = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double w = (k <= m / 2) ? double(k) * delta : -double(m - k) * delta;
            const double mass = model.spectral_mass(w - delta / 2, w + delta / 2);
            total += mass;
            const double r = std::sqrt(double(m) * mass);
            factor[4 * k + 0] = r;
            factor[4 * k + 2] = std::complex<double>(0.0, w * r);
        }
        FftwBuffer scratch(m);
        make_plan(scratch.p);
        return std::abs(total - 1.0) < 1e-6;
    }

    // Returns relative clipped mass; fills factor.
    double build_circulant(const CorrelationModel& model) {
        const std::size_t half = m / 2;
        FftwBuffer c11(m), c12(m), c22(m);
        double d[3];
        for (std::size_t j = 0; j < m; ++j) {
            const double tau = (j <= half) ? double(j) * step : -double(m - j) * step;
            model.derivs(tau, 2, d);
            c11.p[j][0] = d[0];
            c12.p[j][0] = (j == half) ? 0.0 : d[1];
            c22.p[j][0] = -d[2];
            c11.p[j][1] = c12.p[j][1] = c22.p[j][1] = 0.0;
        }
        make_plan(c11.p);
        fftw_execute_dft(plan, c11.p, c11.p);
        fftw_execute_dft(plan, c12.p, c12.p);
        fftw_execute_dft(plan, c22.p, c22.p);

        std::vector<Eigen::Vector2d> evals(m);
        std::vector<Eigen::Matrix2cd> evecs(m);
        double max_eval = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            Eigen::Matrix2cd s;
            const std::complex<double> off(0.0, c12.p[k][1]);  // c12 odd: purely imaginary
            s << c11.p[k][0], off, std::conj(off), c22.p[k][0];
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(s);
            evals[k] = es.eigenvalues();
            evecs[k] = es.eigenvectors();
            max_eval = std::max(max_eval, evals[k].maxCoeff());
        }
        double clipped = 0.0, total = 0.0;
        factor.assign(4 * m, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            for (int i = 0; i < 2; ++i) {
                double lam = evals[k](i);
                total += std::abs(lam);
                if (lam < -kEigenFloor * max_eval) clipped += -lam;
                lam = std::max(lam, 0.0);
                const double r = std::sqrt(lam);
                factor[4 * k + 0 * 2 + i] = evecs[k](0, i) * r;
                factor[4 * k + 1 * 2 + i] = evecs[k](1, i) * r;
            }
        }
        return total > 0 ? clipped / total : 1.0;
    }

    void build_dense(const CorrelationModel& model) {
        const std::size_t dim = 2 * n;
        Eigen::MatrixXd cov(dim, dim);
        double d[3];
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = 0; q < n; ++q) {
                const double tau = (double(q) - double(p)) * step;
                model.derivs(tau, 2, d);
                cov(p, q) = d[0];
                cov(p, n + q) = d[1];
                cov(n + p, q) = -d[1];
                cov(n + p, n + q) = -d[2];
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        const double top = es.eigenvalues().maxCoeff();
        if (es.eigenvalues().minCoeff() < -kEigenFloor * top)
            throw NotPSD("joint grid covariance fails the eigenvalue floor");
        const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        dense_factor = es.eigenvectors() * root.asDiagonal();
        dense = true;
    }
};

PathSampler::PathSampler(ModelPtr model, const SimulationSpec& spec) : impl_(std::make_unique<Impl>()) {
    validate(spec);
    model->require_order(2);
    auto& im = *impl_;
    im.n = static_cast<std::size_t>(std::ceil(spec.window_length / spec.grid_step - 1e-9)) + 1;
    im.n = std::max<std::size_t>(im.n, 2);
    im.step = spec.window_length / double(im.n - 1);
    const std::size_t base =
        next_pow2(static_cast<std::size_t>(std::ceil(spec.padding_factor * double(im.n - 1))));

    double clipped = 1.0;
    for (int doubling = 0; doubling <= kMaxPaddingDoublings; ++doubling) {
        im.m = base << doubling;
        clipped = im.build_circulant(*model);
        if (clipped <= kMaxClippedMass) break;
    }
    info_.grid_points = im.n;
    info_.clipped_mass = clipped;
    if (clipped > kMaxClippedMass) {
        // frequency resolution delta with delta * L <= 0.25
        const auto need = static_cast<std::size_t>(
            std::ceil(2.0 * std::numbers::pi * spec.window_length / (0.25 * im.step)));
        im.m = std::max(base, next_pow2(need));
        if (im.build_spectral(*model)) {
            info_.spectral_route = true;
            clipped = 0.0;
        }
    }
    info_.embedding_size = im.m;
    if (clipped > kMaxClippedMass) {
        if (2 * im.n > kMaxDense)
            throw EmbeddingFailure("circulant embedding clipped mass " + std::to_string(clipped) +
                                   " and the grid is too large for the dense fallback");
        std::cerr << "warning: circulant embedding clipped mass " << clipped
                  << "; using dense factorization\n";
        im.build_dense(*model);
        info_.dense_fallback = true;
    }
}

PathSampler::~PathSampler() = default;

std::pair<GridPath, GridPath> PathSampler::sample_pair(std::uint64_t pair_seed) const {
    const auto& im = *impl_;
    std::mt19937_64 rng(pair_seed);
    boost::random::normal_distribution<double> normal;
    GridPath a, b;
    a.step = b.step = im.step;
    a.f.resize(im.n);
    a.df.resize(im.n);
    b.f.resize(im.n);
    b.df.resize(im.n);

    if (im.dense) {
        const std::size_t dim = 2 * im.n;
        Eigen::VectorXd z(dim);
        for (GridPath* path : {&a, &b}) {
            for (std::size_t i = 0; i < dim; ++i) z(i) = normal(rng);
            const Eigen::VectorXd x = im.dense_factor * z;
            for (std::size_t i = 0; i < im.n; ++i) {
                path->f[i] = x(i);
                path->df[i] = x(im.n + i);
            }
        }
        return {std::move(a), std::move(b)};
    }

    FftwBuffer u0(im.m), u1(im.m);
    const double scale = 1.0 / std::sqrt(double(im.m));
    for (std::size_t k = 0; k < im.m; ++k) {
        const double r0 = normal(rng), i0 = normal(rng), r1 = normal(rng), i1 = normal(rng);
        const std::complex<double> x0(r0, i0), x1(r1, i1);
        const std::complex<double>* fk = &im.factor[4 * k];
        const std::complex<double> v0 = (fk[0] * x0 + fk[1] * x1) * scale;
        const std::complex<double> v1 = (fk[2] * x0 + fk[3] * x1) * scale;
        u0.p[k][0] = v0.real();
        u0.p[k][1] = v0.imag();
        u1.p[k][0] = v1.real();
        u1.p[k][1] = v1.imag();
    }
    fftw_execute_dft(im.plan, u0.p, u0.p);
    fftw_execute_dft(im.plan, u1.p, u1.p);
    for (std::size_t i = 0; i < im.n; ++i) {
        a.f[i] = u0.p[i][0];
        b.f[i] = u0.p[i][1];
        a.df[i] = u1.p[i][0];
        b.df[i] = u1.p[i][1];
    }
    return {std::move(a), std::move(b)};
}

namespace {

struct Cubic {
    double c0, c1, c2, c3;
    double operator()(double t) const { return ((c3 * t + c2) * t + c1) * t + c0; }
    double deriv(double t) const { return (3.0 * c3 * t + 2.0 * c2) * t + c1; }
};

// Root of a monotone piece with p(lo), p(hi) of opposite signs (zero counted as negative).
double refine_root(const Cubic& p, double lo, double hi) {
    double plo = p(lo);
    const bool lo_positive = plo > 0;
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double pt = p(t);
        if (pt == 0.0) return t;
        if ((pt > 0) == lo_positive) {
            lo = t;
            plo = pt;
        } else {
            hi = t;
        }
        if (hi - lo <= 4e-16 * std::max(1.0, std::abs(hi))) return 0.5 * (lo + hi);
        const double dp = p.deriv(t);
        double next = (dp != 0.0) ? t - pt / dp : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        t = next;
    }
    std::cerr << "warning: zero refinement did not settle; using bracket midpoint\n";
    return 0.5 * (lo + hi);
}

}  // namespace

ZeroSample extract_zeros(const GridPath& path, double window_length) {
    ZeroSample out;
    out.window_length = window_length;
    const std::size_t n = path.f.size();
    if (n < 2 || path.df.size() != n) return out;
    const double h = path.step;
    auto positive = [](double v) { return v > 0; };
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double f0 = path.f[j], f1 = path.f[j + 1];
        const double d0 = h * path.df[j], d1 = h * path.df[j + 1];
        const Cubic p{f0, d0, 3.0 * (f1 - f0) - 2.0 * d0 - d1, 2.0 * (f0 - f1) + d0 + d1};
        // split at critical points in (0, 1)
        double cuts[4];
        int nc = 0;
        cuts[nc++] = 0.0;
        const double qa = 3.0 * p.c3, qb = 2.0 * p.c2, qc = p.c1;
        double crit[2];
        int ncrit = 0;
        if (std::abs(qa) > 1e-300) {
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc > 0) {
                const double sq = std::sqrt(disc);
                const double q = -0.5 * (qb + std::copysign(sq, qb));
                crit[ncrit++] = q / qa;
                if (q != 0.0) crit[ncrit++] = qc / q;
            }
        } else if (qb != 0.0) {
            crit[ncrit++] = -qc / qb;
        }
        std::sort(crit, crit + ncrit);
        for (int i = 0; i < ncrit; ++i)
            if (crit[i] > 0.0 && crit[i] < 1.0) cuts[nc++] = crit[i];
        cuts[nc++] = 1.0;
        for (int s = 0; s + 1 < nc; ++s) {
            const double a = cuts[s], b = cuts[s + 1];
            const double pa = (s == 0) ? f0 : p(a);
            const double pb = (s + 2 == nc) ? f1 : p(b);
            if (positive(pa) == positive(pb)) continue;
            const double t = refine_root(p, a, b);
            const double z = (double(j) + t) * h;
            if (z < 0.0 || z > window_length) continue;
            if (!out.zeros.empty() && z <= out.zeros.back()) continue;
            out.zeros.push_back(z);
        }
    }
    return out;
}

std::vector<GridPath> sample_paths(ModelPtr model, const SimulationSpec& spec) {
    PathSampler sampler(model, spec);
    std::vector<GridPath> out(spec.num_samples);
    const std::size_t pairs = (spec.num_samples + 1) / 2;
    parallel_for(pairs, spec.threads, [&](std::size_t p) {
        auto [a, b] = sampler.sample_pair(derive_seed(spec.master_seed, p));
        out[2 * p] = std::move(a);
        if (2 * p + 1 < out.size()) out[2 * p + 1] = std::move(b);
    });
    return out;
}

std::vector<ZeroSample> simulate_zeros(ModelPtr model, const SimulationSpec& spec) {
    PathSampler sampler(model, spec);
    std::vector<ZeroSample> out(spec.num_samples);
    const std::size_t pairs = (spec.num_samples + 1) / 2;
    parallel_for(pairs, spec.threads, [&](std::size_t p) {
        const std::uint64_t seed = derive_seed(spec.master_seed, p);
        auto [a, b] = sampler.sample_pair(seed);
        out[2 * p] = extract_zeros(a, spec.window_length);
        out[2 * p].replicate_seed = seed;
        if (2 * p + 1 < out.size()) {
            out[2 * p + 1] = extract_zeros(b, spec.window_length);
            out[2 * p + 1].replicate_seed = seed;
        }
    });
    return out;
}

double linear_statistic(const ZeroSample& sample, const TestFunction& phi, double R) {
    if (!(R > 0)) throw ConfigError("R must be positive");
    if (phi.lo * R < -1e-12 || phi.hi * R > sample.window_length * (1 + 1e-12))
        throw WindowTooSmall("window [0, " + std::to_string(sample.window_length) +
                             "] does not cover R * support of " + phi.description);
    double s = 0.0;
    for (double z : sample.zeros) s += phi(z / R);
    return s;
}

std::vector<MomentEstimate> moments_from_statistics(const std::vector<double>& stats, double mean,
                                                    const std::vector<int>& orders,
                                                    std::uint64_t seed) {
    for (int p : orders)
        if (p < 1 || p > 6) throw ConfigError("moment orders must lie in 1..6");
    const std::size_t n = stats.size();
    if (n == 0) throw ConfigError("no samples");
    std::vector<double> dev(n);
    for (std::size_t i = 0; i < n; ++i) dev[i] = stats[i] - mean;

    auto moment = [&](const std::vector<std::size_t>* idx, int p) {
        std::vector<double> terms(n);
        for (std::size_t i = 0; i < n; ++i) terms[i] = std::pow(dev[idx ? (*idx)[i] : i], p);
        return pairwise_sum(terms) / double(n);
    };

    constexpr int kResamples = 1000;
    std::vector<std::vector<double>> boot(orders.size(), std::vector<double>(kResamples));
    std::mt19937_64 rng(seed);
    boost::random::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> idx(n);
    for (int b = 0; b < kResamples; ++b) {
        for (auto& i : idx) i = pick(rng);
        for (std::size_t o = 0; o < orders.size(); ++o) boot[o][b] = moment(&idx, orders[o]);
    }

    std::vector<MomentEstimate> out;
    for (std::size_t o = 0; o < orders.size(); ++o) {
        MomentEstimate e;
        e.order = orders[o];
        e.num_samples = n;
        e.estimate = moment(nullptr, orders[o]);
        auto& v = boot[o];
        const double bm = pairwise_sum(v) / kResamples;
        double ss = 0.0;
        for (double x : v) ss += (x - bm) * (x - bm);
        e.std_error = std::sqrt(ss / (kResamples - 1));
        std::sort(v.begin(), v.end());
        auto quantile = [&](double q) {
            const double pos = q * (kResamples - 1);
            const auto i = static_cast<std::size_t>(pos);
            const double w = pos - double(i);
            return i + 1 < v.size() ? v[i] * (1 - w) + v[i + 1] * w : v[i];
        };
        e.ci_lo = quantile(0.025);
        e.ci_hi = quantile(0.975);
        out.push_back(e);
    }
    return out;
}

std::vector<MomentEstimate> empirical_moments(ModelPtr model, const SimulationSpec& spec,
                                              const TestFunction& phi, double R,
                                              const std::vector<int>& orders) {
    const auto samples = simulate_zeros(model, spec);
    std::vector<double> stats(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) stats[i] = linear_statistic(samples[i], phi, R);
    const double mean = expected_linear_statistic(phi, R);
    return moments_from_statistics(stats, mean, orders, derive_seed(spec.master_seed, 0xb0075712ull));
}

KPointEstimate empirical_k_point(ModelPtr model, const SimulationSpec& spec, const std::vector<double>& x,
                                 double epsilon) {
    if (x.empty()) throw ConfigError("empty configuration");
    if (!(epsilon > 0)) throw ConfigError("epsilon must be positive");
    std::vector<double> c = x;
    std::sort(c.begin(), c.end());
    for (std::size_t i = 0; i + 1 < c.size(); ++i)
        if (c[i + 1] - c[i] <= 2 * epsilon) throw IntervalsOverlap("intervals [x_i -+ eps] intersect");
    constexpr double kMargin = 0.5;
    const double shift = kMargin + epsilon - c.front();
    if (c.back() + shift + epsilon + kMargin > spec.window_length)
        throw WindowTooSmall("window too short for the configuration and margins");
    std::vector<double> centers(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) centers[i] = x[i] + shift;

    const auto samples = simulate_zeros(model, spec);
    std::vector<double> prods(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto& z = samples[s].zeros;
        double prod = 1.0;
        for (double ctr : centers) {
            const auto lo = std::lower_bound(z.begin(), z.end(), ctr - epsilon);
            const auto hi = std::upper_bound(z.begin(), z.end(), ctr + epsilon);
            prod *= double(hi - lo);
            if (prod == 0.0) break;
        }
        prods[s] = prod;
    }
    const double n = double(prods.size());
    const double mean = pairwise_sum(prods) / n;
    double ss = 0.0;
    for (double p : prods) ss += (p - mean) * (p - mean);
    const double sd = prods.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    const double scale = std::pow(2 * epsilon, -double(x.size()));
    return {mean * scale, sd / std::sqrt(n) * scale, prods.size()};
}

CltDiagnostic clt_from_statistics(const std::vector<double>& stats, const TestFunction& phi, double R,
                                  double sigma) {
    if (!(sigma > 0)) throw ConfigError("sigma must be positive");
    if (stats.empty()) throw ConfigError("no samples");
    const double mu = expected_linear_statistic(phi, R);
    const double norm2 = inner_product(phi, phi);
    const std::size_t n = stats.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = (stats[i] - mu) / (std::sqrt(R) * sigma);

    CltDiagnostic out;
    out.target_variance = norm2;
    out.num_samples = n;
    std::vector<double> sorted = y;
    std::sort(sorted.begin(), sorted.end());
    const double sd = std::sqrt(norm2);
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = 0.5 * std::erfc(-sorted[i] / (sd * std::numbers::sqrt2));
        ks = std::max({ks, double(i + 1) / double(n) - cdf, cdf - double(i) / double(n)});
    }
    out.ks_distance = ks;

    const double m1 = pairwise_sum(y) / double(n);
    std::vector<double> t2(n), t3(n), t4(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = y[i] - m1;
        t2[i] = d * d;
        t3[i] = d * d * d;
        t4[i] = t2[i] * t2[i];
    }
    const double m2 = pairwise_sum(t2) / double(n);
    const double m3 = pairwise_sum(t3) / double(n);
    const double m4 = pairwise_sum(t4) / double(n);
    out.standardized_moments = {m1, m2, m3 / std::pow(m2, 1.5), m4 / (m2 * m2)};
    return out;
}

CltDiagnostic clt_diagnostic(ModelPtr model, const SimulationSpec& spec, const TestFunction& phi, double R,
                             double sigma) {
    const auto samples = simulate_zeros(model, spec);
    std::vector<double> stats(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) stats[i] = linear_statistic(samples[i], phi, R);
    return clt_from_statistics(stats, phi, R, sigma);
}

}  // namespace gausszeros
