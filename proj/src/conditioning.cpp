#include "gausszeros/conditioning.hpp"

#include "gausszeros/errors.hpp"
#include "gausszeros/parallel.hpp"

#include <Eigen/Dense>
#include <boost/math/constants/constants.hpp>
#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace gausszeros {

namespace {

template <class T>
ContextT<T> assemble_impl(const CorrelationModel& model, const Configuration& x_in,
                          const IndexPartition& partition, bool want_lambda) {
    if (static_cast<std::size_t>(partition.ground_size()) != x_in.size())
        throw GroundSetMismatch("partition ground set does not match configuration length");
    model.require_order(2 * partition.max_block_size());

    ContextT<T> ctx;
    ctx.x = snap_configuration(x_in);
    ctx.partition = partition;
    const std::size_t n = ctx.x.size();
    const auto& blocks = partition.blocks();
    const std::size_t nb = blocks.size();

    std::vector<std::vector<T>> pts(nb);
    std::vector<std::size_t> off(nb + 1, 0);
    for (std::size_t b = 0; b < nb; ++b) {
        for (int i : blocks[b]) pts[b].push_back(T(ctx.x[i]));
        off[b + 1] = off[b] + blocks[b].size();
    }

    ctx.theta = DenseMatrix<T>(n, n);
    ctx.xi = DenseMatrix<T>(n, n);
    ctx.omega = DenseMatrix<T>(n, n);
    for (std::size_t b1 = 0; b1 < nb; ++b1) {
        const auto& u = pts[b1];
        const std::size_t m1 = u.size();
        for (std::size_t b2 = 0; b2 < nb; ++b2) {
            const auto& v = pts[b2];
            const std::size_t m2 = v.size();
            if (b2 >= b1) {
                const auto d = double_divided_diff_matrix_t(model, u, v);
                for (std::size_t a = 0; a < m1; ++a)
                    for (std::size_t c = 0; c < m2; ++c) {
                        ctx.theta(off[b1] + a, off[b2] + c) = d(a, c);
                        ctx.theta(off[b2] + c, off[b1] + a) = d(a, c);
                    }
            }
            for (std::size_t k = 0; k < m1; ++k) {
                auto uk = u;
                uk.push_back(u[k]);
                const auto d = double_divided_diff_matrix_t(model, uk, v);
                for (std::size_t c = 0; c < m2; ++c) ctx.xi(off[b1] + k, off[b2] + c) = d(m1, c);
                if (b2 < b1) continue;
                for (std::size_t l = 0; l < m2; ++l) {
                    auto vl = v;
                    vl.push_back(v[l]);
                    const auto e = double_divided_diff_matrix_t(model, uk, vl);
                    ctx.omega(off[b1] + k, off[b2] + l) = e(m1, m2);
                    ctx.omega(off[b2] + l, off[b1] + k) = e(m1, m2);
                }
            }
        }
    }

    DenseMatrix<T> l;
    const std::size_t rank = psd_cholesky(ctx.theta, l, T(0));
    T det(rank == n ? 1 : 0), diag(1);
    for (std::size_t i = 0; i < n; ++i) {
        det *= l(i, i) * l(i, i);
        diag *= ctx.theta(i, i);
    }
    ctx.d_value = det;
    const bool ok = rank == n && diag > 0 && det / diag > T(kDegenerateRelDet);
    if (!ok) {
        if (want_lambda)
            throw DegenerateConfiguration("theta is degenerate for partition " + partition.to_string() +
                                          " (coincident points inside distinct blocks?)");
        return ctx;
    }
    auto w = transpose(ctx.xi);
    forward_solve(l, w);  // L^{-1} Xi^T
    ctx.lambda = ctx.omega;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            T s(0);
            for (std::size_t r = 0; r < n; ++r) s += w(r, i) * w(r, j);
            const T v = ctx.omega(i, j) - s;
            ctx.lambda(i, j) = v;
            ctx.lambda(j, i) = v;
        }
    ctx.has_lambda = true;
    return ctx;
}

template <class T>
T pi2_correlated(const T& r_in) {
    using std::asin;
    using std::sqrt;
    const T r = r_in > 1 ? T(1) : (r_in < -1 ? T(-1) : r_in);
    return 2 / boost::math::constants::pi<T>() * (sqrt(1 - r * r) + r * asin(r));
}

void check_psd(const DenseMatrix<double>& v) {
    const std::size_t k = v.rows;
    if (v.cols != k) throw NotPSD("variance matrix is not square");
    Eigen::MatrixXd m(k, k);
    double trace = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        trace += v(i, i);
        for (std::size_t j = 0; j < k; ++j) {
            if (std::abs(v(i, j) - v(j, i)) > 1e-10 * (std::abs(v(i, j)) + std::abs(v(j, i)) + 1e-300))
                throw NotPSD("variance matrix is not symmetric");
            m(i, j) = 0.5 * (v(i, j) + v(j, i));
        }
    }
    if (k == 0) return;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10 * std::abs(trace))
        throw NotPSD("variance matrix has eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
}

// Per-chunk sums; chunks are fixed so totals do not depend on thread count.
struct Sums {
    double p = 0, pp = 0, q = 0, qq = 0, d = 0, dd = 0;
};

constexpr std::uint64_t kChunk = 1u << 16;

template <class SampleFn>
Sums run_chunks(const MonteCarloSpec& mc, std::size_t dim, SampleFn&& sample) {
    if (mc.samples < 2) throw ConfigError("Monte Carlo needs at least 2 samples");
    const std::uint64_t chunks = (mc.samples + kChunk - 1) / kChunk;
    std::vector<Sums> parts(chunks);
    parallel_for(chunks, mc.threads, [&](std::size_t c) {
        std::mt19937_64 eng(derive_seed(mc.seed, c));
        boost::random::normal_distribution<double> nd;
        std::vector<double> z(dim);
        const std::uint64_t lo = c * kChunk, hi = std::min<std::uint64_t>(mc.samples, lo + kChunk);
        Sums s;
        for (std::uint64_t i = lo; i < hi; ++i) {
            for (auto& zi : z) zi = nd(eng);
            double p, q;
            sample(z, p, q);
            s.p += p;
            s.pp += p * p;
            s.q += q;
            s.qq += q * q;
            s.d += p - q;
            s.dd += (p - q) * (p - q);
        }
        parts[c] = s;
    });
    Sums t;
    for (const auto& s : parts) {
        t.p += s.p;
        t.pp += s.pp;
        t.q += s.q;
        t.qq += s.qq;
        t.d += s.d;
        t.dd += s.dd;
    }
    return t;
}

double sample_var(double sum, double sumsq, double n) {
    return std::max(0.0, (sumsq - sum * sum / n) / (n - 1));
}

// Monte Carlo for E prod |X_i| on a correlation matrix c (unit diagonal).
// Control variate: the same normals pushed through the factor of the
// block-diagonal matrix keeping only a greedy pairing, whose expectation is
// a product of closed forms.
PiResultExt pi_mc(const DenseMatrix<Extended>& c_ext, const MonteCarloSpec& mc) {
    const std::size_t k = c_ext.rows;
    const auto c = convert<double>(c_ext);

    std::vector<std::size_t> order;
    std::vector<bool> used(k, false);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    while (true) {
        double best = -1;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j)
                if (!used[i] && !used[j] && std::abs(c(i, j)) > best) {
                    best = std::abs(c(i, j));
                    bi = i;
                    bj = j;
                }
        if (best < 0) break;
        used[bi] = used[bj] = true;
        pairs.emplace_back(bi, bj);
        order.push_back(bi);
        order.push_back(bj);
    }
    for (std::size_t i = 0; i < k; ++i)
        if (!used[i]) order.push_back(i);

    DenseMatrix<double> cp(k, k), lbd(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) cp(i, j) = c(order[i], order[j]);
    DenseMatrix<double> lfull;
    psd_cholesky(cp, lfull, 1e-14);

    Extended exact(1);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const Extended r = c_ext(pairs[p].first, pairs[p].second);
        exact *= pi2_correlated(r);
        const double rd = std::clamp(cp(2 * p + 1, 2 * p), -1.0, 1.0);
        lbd(2 * p, 2 * p) = 1.0;
        lbd(2 * p + 1, 2 * p) = rd;
        lbd(2 * p + 1, 2 * p + 1) = std::sqrt(std::max(0.0, 1 - rd * rd));
    }
    if (k % 2) {
        exact *= sqrt(2 / boost::math::constants::pi<Extended>());
        lbd(k - 1, k - 1) = 1.0;
    }

    const Sums s = run_chunks(mc, k, [&](const std::vector<double>& z, double& p, double& q) {
        p = 1.0;
        q = 1.0;
        for (std::size_t i = 0; i < k; ++i) {
            double xi = 0.0;
            for (std::size_t j = 0; j <= i; ++j) xi += lfull(i, j) * z[j];
            p *= std::abs(xi);
        }
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j0 = (i % 2 && i + 1 <= 2 * pairs.size()) ? i - 1 : i;
            double yi = 0.0;
            for (std::size_t j = j0; j <= i; ++j) yi += lbd(i, j) * z[j];
            q *= std::abs(yi);
        }
    });
    const double n = static_cast<double>(mc.samples);
    const double var_p = sample_var(s.p, s.pp, n);
    const double var_d = sample_var(s.d, s.dd, n);
    PiResultExt out;
    if (var_d <= var_p) {
        out.value = exact + Extended(s.d / n);
        out.std_error = std::sqrt(var_d / n);
    } else {
        out.value = Extended(s.p / n);
        out.std_error = std::sqrt(var_p / n);
    }
    return out;
}

}  // namespace

KacRiceContext assemble_context(const CorrelationModel& model, const Configuration& x,
                                const IndexPartition& partition, bool want_lambda) {
    const auto e = assemble_impl<Extended>(model, x, partition, want_lambda);
    KacRiceContext c;
    c.x = e.x;
    c.partition = e.partition;
    c.theta = convert<double>(e.theta);
    c.xi = convert<double>(e.xi);
    c.omega = convert<double>(e.omega);
    c.has_lambda = e.has_lambda;
    if (e.has_lambda) c.lambda = convert<double>(e.lambda);
    c.d_value = static_cast<double>(e.d_value);
    return c;
}

ContextT<Extended> assemble_context_ext(const CorrelationModel& model, const Configuration& x,
                                        const IndexPartition& partition, bool want_lambda) {
    return assemble_impl<Extended>(model, x, partition, want_lambda);
}

PiResultExt pi_k_ext(const DenseMatrix<Extended>& u, const MonteCarloSpec& mc) {
    check_psd(convert<double>(u));
    const std::size_t k = u.rows;
    PiResultExt out;
    if (k == 0) {
        out.value = 1;
        return out;
    }
    std::vector<Extended> s(k);
    Extended scale(1);
    for (std::size_t i = 0; i < k; ++i) {
        if (u(i, i) <= 0) return out;  // a coordinate is a.s. zero
        s[i] = sqrt(u(i, i));
        scale *= s[i];
    }
    if (k == 1) {
        out.value = scale * sqrt(2 / boost::math::constants::pi<Extended>());
        return out;
    }
    if (k == 2) {
        out.value = scale * pi2_correlated(Extended(u(0, 1) / scale));
        return out;
    }
    DenseMatrix<Extended> c(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) c(i, j) = u(i, j) / (s[i] * s[j]);
    auto r = pi_mc(c, mc);
    r.value *= scale;
    r.std_error *= static_cast<double>(scale);
    return r;
}

PiResult pi_k(const DenseMatrix<double>& variance, const MonteCarloSpec& mc) {
    const auto r = pi_k_ext(convert<Extended>(variance), mc);
    return {static_cast<double>(r.value), r.std_error};
}

namespace {

Extended hafnian(const DenseMatrix<Extended>& v, std::vector<std::size_t>& idx) {
    if (idx.empty()) return 1;
    const std::size_t a = idx.front();
    Extended total(0);
    for (std::size_t j = 1; j < idx.size(); ++j) {
        const std::size_t b = idx[j];
        std::vector<std::size_t> rest;
        for (std::size_t t = 1; t < idx.size(); ++t)
            if (t != j) rest.push_back(idx[t]);
        total += v(a, b) * hafnian(v, rest);
    }
    return total;
}

}  // namespace

PiResultExt abs_moment(const DenseMatrix<Extended>& u, const std::vector<int>& e,
                       const MonteCarloSpec& mc) {
    const std::size_t k = u.rows;
    if (e.size() != k) throw ConfigError("abs_moment: exponent count differs from dimension");
    if (std::all_of(e.begin(), e.end(), [](int v) { return v == 1; })) return pi_k_ext(u, mc);
    check_psd(convert<double>(u));
    PiResultExt out;
    if (std::all_of(e.begin(), e.end(), [](int v) { return v % 2 == 0; })) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < k; ++i)
            for (int t = 0; t < e[i]; ++t) idx.push_back(i);
        out.value = hafnian(u, idx);
        return out;
    }
    DenseMatrix<double> l;
    psd_cholesky(convert<double>(u), l, 1e-14);
    const Sums s = run_chunks(mc, k, [&](const std::vector<double>& z, double& p, double& q) {
        p = 1.0;
        q = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            double xi = 0.0;
            for (std::size_t j = 0; j <= i; ++j) xi += l(i, j) * z[j];
            p *= std::pow(std::abs(xi), e[i]);
        }
    });
    const double n = static_cast<double>(mc.samples);
    out.value = s.p / n;
    out.std_error = std::sqrt(sample_var(s.p, s.pp, n) / n);
    return out;
}

double holder_constant(int k) {
    // mu_{2k} = (2k-1)!!
    double mu = 1.0;
    for (int i = 2 * k - 1; i > 0; i -= 2) mu *= i;
    return k * std::pow(2.0 * k + 1, (k + 1) / 2.0) * std::sqrt(mu);
}

double sup_norm(const DenseMatrix<double>& u) {
    double m = 0.0;
    for (double v : u.data) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace gausszeros
