#include "doctest.h"

#include "gausszeros/densities.hpp"
#include "gausszeros/errors.hpp"
#include "gausszeros/pair_correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace gausszeros;

namespace {

const char* kPresets[] = {"bargmann-fock", "cauchy", "sinc"};
constexpr double kPi = std::numbers::pi;

// rho_2(0, z) from the two-point conditional Gaussian law, mpmath at 30 digits.
struct Rho2Oracle {
    const char* model;
    double z;
    double rho;
};
const Rho2Oracle kRho2[] = {
    {"bargmann-fock", 0.05, 0.003978064178322166624},
    {"bargmann-fock", 0.5, 0.03908451002654734559},
    {"bargmann-fock", 1.0, 0.07376759275306014592},
    {"bargmann-fock", 2.0, 0.10436923762470754087},
    {"bargmann-fock", 5.0, 0.10132118401311992885},
    {"cauchy", 0.05, 0.009920848218035000},
    {"cauchy", 0.5, 0.07977871774878996},
    {"cauchy", 1.0, 0.10377739327290684},
    {"cauchy", 2.0, 0.10386706643786281},
    {"cauchy", 5.0, 0.10153468597853980},
    {"sinc", 0.05, 0.001592403255646945},
    {"sinc", 0.5, 0.016793363366746909},
    {"sinc", 1.0, 0.039221009716858852},
    {"sinc", 2.0, 0.11459771223410071},
    {"sinc", 5.0, 0.10059300254465263},
};

MonteCarloSpec small_mc(std::uint64_t seed = 7) {
    MonteCarloSpec mc;
    mc.samples = 200'000;
    mc.seed = seed;
    return mc;
}

double min_pair_product(const Configuration& x) {
    double p = 1;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) p *= std::min(std::abs(x[i] - x[j]), 1.0);
    return std::sqrt(p);
}

}  // namespace

TEST_CASE("one-point density is 1/pi") {
    for (auto name : kPresets) {
        auto m = make_preset(name);
        for (double t : {-3.0, 0.0, 7.0}) {
            auto r = rho_k(*m, {t});
            CHECK(std::abs(r.rho - 1 / kPi) < 1e-12);
        }
    }
}

TEST_CASE("two-point density matches conditional Gaussian oracle") {
    for (const auto& o : kRho2) {
        CAPTURE(o.model);
        CAPTURE(o.z);
        auto m = make_preset(o.model);
        auto r = rho_k(*m, {0.0, o.z});
        CHECK(r.rho == doctest::Approx(o.rho).epsilon(1e-10));
        CHECK(r.n_std_error == 0.0);
    }
}

TEST_CASE("two-point density tends to 1/pi^2 at large separation") {
    auto m = make_preset("bargmann-fock");
    auto r = rho_k(*m, {0.0, 10.0});
    CHECK(std::abs(r.rho - 1 / (kPi * kPi) - two_point_F(*m, 10.0)) < 1e-14);
    CHECK(std::abs(r.rho - 1 / (kPi * kPi)) < 1e-12);
}

TEST_CASE("density vanishes on the diagonal") {
    auto m = make_preset("bargmann-fock");
    auto r = rho_k(*m, {0.0, 0.0});
    CHECK(r.rho == 0.0);
    auto b = rho_with_partition(*m, {0.0, 0.0}, IndexPartition::one_block(2));
    CHECK(b.rho == 0.0);
    CHECK(b.d_value > 0);
    CHECK(b.n_value > 0);
    CHECK_THROWS_AS(rho_with_partition(*m, {0.0, 0.0}, IndexPartition::singletons(2)),
                    DegenerateConfiguration);
    auto r3 = rho_k(*m, {0.0, 0.4, 0.4}, small_mc());
    CHECK(r3.rho == 0.0);
}

TEST_CASE("partition routes agree for two points") {
    auto m = make_preset("bargmann-fock");
    for (double z : {1e-3, 3e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0}) {
        CAPTURE(z);
        auto a = rho_with_partition(*m, {0.0, z}, IndexPartition::singletons(2));
        auto b = rho_with_partition(*m, {0.0, z}, IndexPartition::one_block(2));
        REQUIRE(std::isfinite(b.rho));
        CHECK(std::abs(a.rho - b.rho) / b.rho < 1e-8);
    }
    // naive determinant at 1e-3 is about 1e-6 (times the z^2 prefactor it hides)
    auto naive = assemble_context(*m, {0.0, 1e-3}, IndexPartition::singletons(2));
    CHECK(naive.d_value < 1e-5);
}

TEST_CASE("determinant factorizes through the Vandermonde product") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    auto m = make_preset("bargmann-fock");
    for (int trial = 0; trial < 40; ++trial) {
        const int k = 2 + trial % 3;
        Configuration x(k);
        for (auto& v : x) v = u(rng);
        auto parts = enumerate_partitions(k);
        const auto& p = parts[trial % parts.size()];
        CAPTURE(trial);
        auto ctx_s = assemble_context_ext(*m, x, IndexPartition::singletons(k));
        auto ctx_p = assemble_context_ext(*m, x, p);
        Extended v2 = 1;
        for (const auto& b : p.blocks())
            for (std::size_t i = 0; i < b.size(); ++i)
                for (std::size_t j = i + 1; j < b.size(); ++j) {
                    Extended d = Extended(x[b[i]]) - Extended(x[b[j]]);
                    v2 *= d * d;
                }
        const double lhs = static_cast<double>(ctx_s.d_value);
        const double rhs = static_cast<double>(v2 * ctx_p.d_value);
        CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(lhs));
    }
}

// Given f = 0 on a block, f'(x_i) is prod_{j != i} (x_i - x_j) times the
// divided difference with x_i doubled, so Lambda scales by that diagonal.
TEST_CASE("conditional covariance factorizes and N follows") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.8);
    auto m = make_preset("bargmann-fock");
    for (int trial = 0; trial < 12; ++trial) {
        const int k = 2 + trial % 3;
        Configuration x(k);
        for (auto& v : x) v = u(rng);
        const auto p = IndexPartition::one_block(k);
        CAPTURE(trial);
        auto cs = assemble_context(*m, x, IndexPartition::singletons(k));
        auto cp = assemble_context(*m, x, p);
        std::vector<double> s(k, 1.0);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                if (j != i) s[i] *= x[i] - x[j];
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                const double want = s[i] * s[j] * cp.lambda(i, j);
                CHECK(std::abs(cs.lambda(i, j) - want) <=
                      1e-8 * std::sqrt(std::abs(cs.lambda(i, i) * cs.lambda(j, j))));
            }
        auto a = rho_with_partition(*m, x, IndexPartition::singletons(k), small_mc(trial));
        auto b = rho_with_partition(*m, x, p, small_mc(trial + 100));
        const double v2 = b.vandermonde_factor * b.vandermonde_factor;
        const double se = std::hypot(a.n_std_error, v2 * b.n_std_error);
        if (k <= 2)
            CHECK(std::abs(a.n_value - v2 * b.n_value) <= 1e-8 * a.n_value);
        else
            CHECK(std::abs(a.n_value - v2 * b.n_value) <= 3 * se);
    }
}

TEST_CASE("density is symmetric under permutations") {
    auto m = make_preset("bargmann-fock");
    for (Configuration x : {Configuration{0.0, 0.3, 1.1}, Configuration{-0.4, 0.2, 0.9, 2.4}}) {
        const int k = static_cast<int>(x.size());
        auto base = rho_k(*m, x, small_mc(1));
        auto perm = x;
        std::sort(perm.begin(), perm.end());
        int count = 0;
        do {
            if (++count > 8) break;
            auto r = rho_k(*m, perm, small_mc(count + 1));
            auto cb = assemble_context_ext(*m, x, IndexPartition::singletons(k));
            auto cr = assemble_context_ext(*m, perm, IndexPartition::singletons(k));
            CHECK(static_cast<double>(abs(cb.d_value - cr.d_value) / cb.d_value) < 1e-8);
            const double se = std::hypot(base.rho * base.n_std_error / base.n_value,
                                         r.rho * r.n_std_error / r.n_value);
            CHECK(std::abs(r.rho - base.rho) <= 3 * se);
        } while (std::next_permutation(perm.begin(), perm.end()));
        // k = 2 is closed form, so symmetry is exact there
        auto ab = rho_k(*m, {0.0, 0.7});
        auto ba = rho_k(*m, {0.7, 0.0});
        CHECK(std::abs(ab.rho - ba.rho) <= 1e-14 * ab.rho);
    }
}

TEST_CASE("vanishing constant at a double point") {
    // kappa''''(0) = 3, 9/5, 6 respectively; l = (kappa''''(0) - 1) / (8 pi)
    const std::pair<const char*, double> cases[] = {
        {"bargmann-fock", 1 / (4 * kPi)}, {"sinc", 1 / (10 * kPi)}, {"cauchy", 5 / (8 * kPi)}};
    for (auto [name, want] : cases) {
        CAPTURE(name);
        auto m = make_preset(name);
        auto v = vanishing_constant(*m, {0.0, 0.0});
        CHECK(v.value == doctest::Approx(want).epsilon(1e-6));
        CHECK(v.partition == IndexPartition::one_block(2));
    }
}

TEST_CASE("vanishing constant at distinct points is the density") {
    auto m = make_preset("bargmann-fock");
    auto v = vanishing_constant(*m, {0.0, 1.3});
    auto r = rho_k(*m, {0.0, 1.3});
    CHECK(v.value == doctest::Approx(r.rho).epsilon(1e-10));
    auto v1 = vanishing_constant(*m, {2.0});
    CHECK(v1.value == doctest::Approx(1 / kPi).epsilon(1e-12));
}

TEST_CASE("triple point vanishing constant is positive") {
    auto m = make_preset("bargmann-fock");
    MonteCarloSpec mc;
    mc.samples = 200'000;
    auto v = vanishing_constant(*m, {0.0, 0.0, 0.0}, mc);
    CHECK(v.value > 0);
    CHECK(v.std_error < 0.05 * v.value);
}

TEST_CASE("rho_2(0, eps) / eps converges to the vanishing constant") {
    for (auto name : kPresets) {
        CAPTURE(name);
        auto m = make_preset(name);
        const double ell = vanishing_constant(*m, {0.0, 0.0}).value;
        std::vector<double> err;
        for (double eps : {1e-1, 1e-2, 1e-3}) err.push_back(std::abs(rho_k(*m, {0.0, eps}).rho / eps - ell));
        const double order1 = std::log10(err[0] / err[1]);
        const double order2 = std::log10(err[1] / err[2]);
        CAPTURE(order1);
        CAPTURE(order2);
        CHECK(order1 >= 1.0);
        CHECK(order2 >= 1.0);
        CHECK(err[1] / ell < 1e-2);
    }
}

TEST_CASE("clustering ratio") {
    auto m = make_preset("bargmann-fock");
    auto far = clustering_ratio(*m, {0.0, 8.0}, IndexPartition::singletons(2));
    CHECK(std::abs(far.ratio - 1) < 1e-6);
    auto one = clustering_ratio(*m, {0.0, 0.5, 6.0, 6.5}, IndexPartition::one_block(4), small_mc());
    CHECK(one.ratio == 1.0);
    double prev = 1.0;
    for (double t : {6.0, 8.0, 10.0}) {
        CAPTURE(t);
        auto c = clustering_ratio(*m, {0.0, 0.5, t, t + 0.5}, IndexPartition::parse("{0,1},{2,3}"));
        CHECK(std::abs(c.ratio - 1) <= 10 * c.bound);
        CHECK(c.bound == doctest::Approx(std::sqrt(tail_norm(*m, 4, t - 0.5))));
        const double dev = std::abs(static_cast<double>(c.deviation));
        CHECK(dev < prev);
        prev = dev;
    }
    CHECK_THROWS_AS(clustering_ratio(*m, {0.0, 0.5}, IndexPartition::singletons(2)), SeparationTooSmall);
}

TEST_CASE("density stays bounded near the diagonal") {
    auto m = make_preset("bargmann-fock");
    // calibration grid
    double cmax2 = 0, cmax3 = 0;
    for (double a : {1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0}) {
        cmax2 = std::max(cmax2, rho_k(*m, {0.0, a}).rho / min_pair_product({0.0, a}));
        for (double b : {1e-2, 0.3, 1.5}) {
            Configuration x{0.0, a, a + b};
            cmax3 = std::max(cmax3, rho_k(*m, x, small_mc()).rho / min_pair_product(x));
        }
    }
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lg(-3.0, 0.5);
    for (int trial = 0; trial < 40; ++trial) {
        const double a = std::pow(10.0, lg(rng));
        const double b = std::pow(10.0, lg(rng));
        CHECK(rho_k(*m, {0.0, a}).rho / min_pair_product({0.0, a}) <= 3 * cmax2);
        if (trial % 4 == 0) {
            Configuration x{0.0, a, a + b};
            CHECK(rho_k(*m, x, small_mc(trial)).rho / min_pair_product(x) <= 3 * cmax3);
        }
    }
}

TEST_CASE("density error cases") {
    auto m = make_preset("bargmann-fock");
    CHECK_THROWS_AS(rho_k(*m, Configuration(7, 0.0)), SizeCap);
    CHECK_THROWS_AS(rho_with_partition(*m, {0.0, 1.0}, IndexPartition::singletons(3)), GroundSetMismatch);
}
