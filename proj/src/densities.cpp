#include "gausszeros/densities.hpp"

#include "gausszeros/errors.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <limits>

namespace gausszeros {

namespace {

Extended two_pi_pow(std::size_t n) {
    return pow(2 * boost::math::constants::pi<Extended>(), Extended(n) / 2);
}

}  // namespace

DensityResult rho_with_partition(const CorrelationModel& model, const Configuration& x,
                                 const IndexPartition& partition, const MonteCarloSpec& mc) {
    if (x.empty()) throw ConfigError("rho: empty configuration");
    if (x.size() > static_cast<std::size_t>(kMaxPoints))
        throw SizeCap("rho: at most " + std::to_string(kMaxPoints) + " points");
    const auto ctx = assemble_context_ext(model, x, partition, true);
    const auto n = pi_k_ext(ctx.lambda, mc);

    Extended vdm(1);
    for (const auto& b : partition.blocks())
        for (std::size_t i = 0; i < b.size(); ++i)
            for (std::size_t j = i + 1; j < b.size(); ++j)
                vdm *= abs(Extended(ctx.x[b[i]]) - Extended(ctx.x[b[j]]));

    DensityResult r;
    r.partition_used = partition;
    r.d_value = static_cast<double>(ctx.d_value);
    r.n_value = static_cast<double>(n.value);
    r.n_std_error = n.std_error;
    r.vandermonde_factor = static_cast<double>(vdm);
    const Extended denom = two_pi_pow(x.size()) * sqrt(ctx.d_value);
    r.rho_extended = vdm * n.value / denom;
    r.rho = static_cast<double>(r.rho_extended);
    return r;
}

DensityResult rho_k(const CorrelationModel& model, const Configuration& x, const MonteCarloSpec& mc) {
    const auto snapped = snap_configuration(x);
    const auto part = cluster_partition(snapped, 1.0);
    try {
        return rho_with_partition(model, snapped, part, mc);
    } catch (const DegenerateConfiguration&) {
        const auto top = IndexPartition::one_block(static_cast<int>(x.size()));
        if (part == top) throw;
        return rho_with_partition(model, snapped, top, mc);
    }
}

VanishingConstant vanishing_constant(const CorrelationModel& model, const Configuration& y_in,
                                     const MonteCarloSpec& mc) {
    const auto y = snap_configuration(y_in);
    const auto part = cluster_partition(y, 0.0);
    const auto& blocks = part.blocks();
    model.require_order(2 * part.max_block_size());

    // U: f^{(i)}(y_I), i < |I|; V: f^{(|I|)}(y_I)
    struct Coord {
        Extended at;
        int deriv;
    };
    std::vector<Coord> u, v;
    std::vector<int> expo;
    Extended prefactor(1);
    for (const auto& b : blocks) {
        const Extended at(y[b.front()]);
        const int m = static_cast<int>(b.size());
        Extended mfact(1);
        for (int i = 2; i <= m; ++i) mfact *= i;
        Extended ifact(1);
        for (int i = 0; i < m; ++i) {
            if (i > 1) ifact *= i;
            u.push_back({at, i});
            prefactor *= ifact / mfact;
        }
        v.push_back({at, m});
        expo.push_back(m);
    }
    const int top = 2 * part.max_block_size();
    std::vector<Extended> buf(top + 1);
    auto cov = [&](const Coord& a, const Coord& b) {
        model.derivs(b.at - a.at, a.deriv + b.deriv, buf.data());
        const Extended val = buf[a.deriv + b.deriv];
        return a.deriv % 2 ? -val : val;
    };
    const std::size_t nu = u.size(), nv = v.size();
    DenseMatrix<Extended> vu(nu, nu), cvu(nu, nv), vv(nv, nv);
    for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t j = 0; j < nu; ++j) vu(i, j) = cov(u[i], u[j]);
    for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t j = 0; j < nv; ++j) cvu(i, j) = cov(u[i], v[j]);
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t j = 0; j < nv; ++j) vv(i, j) = cov(v[i], v[j]);

    DenseMatrix<Extended> l;
    const std::size_t rank = psd_cholesky(vu, l, Extended(0));
    Extended det(rank == nu ? 1 : 0), diag(1);
    for (std::size_t i = 0; i < nu; ++i) {
        det *= l(i, i) * l(i, i);
        diag *= vu(i, i);
    }
    if (rank != nu || !(det / diag > Extended(kDegenerateRelDet)))
        throw DegenerateConfiguration("derivative vector at the diagonal point is degenerate");
    forward_solve(l, cvu);  // L^{-1} Cov(U, V)
    DenseMatrix<Extended> s(nv, nv);
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t j = 0; j < nv; ++j) {
            Extended acc(0);
            for (std::size_t r = 0; r < nu; ++r) acc += cvu(r, i) * cvu(r, j);
            s(i, j) = vv(i, j) - acc;
        }
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t j = 0; j < i; ++j) s(i, j) = s(j, i) = (s(i, j) + s(j, i)) / 2;

    const auto m = abs_moment(s, expo, mc);
    const Extended scale = prefactor / (two_pi_pow(nu) * sqrt(det));
    VanishingConstant out;
    out.partition = part;
    out.value = static_cast<double>(scale * m.value);
    out.std_error = static_cast<double>(scale) * m.std_error;
    return out;
}

ClusteringRatio clustering_ratio(const CorrelationModel& model, const Configuration& x_in,
                                 const IndexPartition& partition, const MonteCarloSpec& mc) {
    const auto x = snap_configuration(x_in);
    if (static_cast<std::size_t>(partition.ground_size()) != x.size())
        throw GroundSetMismatch("clustering_ratio: partition does not match configuration");
    ClusteringRatio out;
    if (partition.size() == 1) {
        out.eta = std::numeric_limits<double>::infinity();
        return out;
    }
    double eta = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j)
            if (partition.block_of(static_cast<int>(i)) != partition.block_of(static_cast<int>(j)))
                eta = std::min(eta, std::abs(x[i] - x[j]));
    if (eta < 1.0)
        throw SeparationTooSmall("clustering_ratio: blocks are only " + std::to_string(eta) + " apart");
    out.eta = eta;

    Extended prod(1);
    for (const auto& b : partition.blocks()) {
        Configuration sub;
        for (int i : b) sub.push_back(x[i]);
        prod *= rho_k(model, sub, mc).rho_extended;
    }
    const Extended whole = rho_k(model, x, mc).rho_extended;
    const Extended ratio = prod / whole;
    out.deviation = ratio - 1;
    out.ratio = static_cast<double>(ratio);
    out.bound = std::sqrt(tail_norm(model, static_cast<int>(x.size()), eta));
    return out;
}

}  // namespace gausszeros
