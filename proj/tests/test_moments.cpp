#include "doctest.h"

#include "gausszeros/densities.hpp"
#include "gausszeros/errors.hpp"
#include "gausszeros/moments.hpp"

#include <cmath>
#include <numbers>

using namespace gausszeros;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("moment integrand for two points") {
    auto m = make_preset("bargmann-fock");
    for (double z : {0.3, 1.0, 2.5}) {
        const double f = moment_integrand_F(*m, IndexPartition::singletons(2), {0.0, z});
        CHECK(f == doctest::Approx(two_point_F(*m, z)).epsilon(1e-10));
        // translation invariance
        const double g = moment_integrand_F(*m, IndexPartition::singletons(2), {4.0, 4.0 + z});
        CHECK(g == doctest::Approx(f).epsilon(1e-10));
    }
    CHECK(moment_integrand_F(*m, IndexPartition::one_block(2), {1.7}) ==
          doctest::Approx(1 / kPi).epsilon(1e-12));
}

TEST_CASE("moment integrand cancels for separated singletons") {
    auto m = make_preset("bargmann-fock");
    MonteCarloSpec mc;
    mc.samples = 200'000;
    const double f = moment_integrand_F(*m, IndexPartition::singletons(3), {0.0, 10.0, 20.0}, mc);
    CHECK(std::abs(f) < 1e-3 / (kPi * kPi * kPi));
    // a lone far point still cancels the whole sum
    const double g = moment_integrand_F(*m, IndexPartition::singletons(3), {0.0, 0.8, 20.0}, mc);
    CHECK(std::abs(g) < 1e-3 * std::abs(two_point_F(*m, 0.8)) + 1e-4);
    CHECK_THROWS_AS(moment_integrand_F(*m, IndexPartition::singletons(2), {0.0}), ConfigError);
}

TEST_CASE("predicted central moments follow the pair-partition count") {
    auto m = make_preset("bargmann-fock");
    auto ind = TestFunction::indicator(0, 1);
    const double R = 20.0;
    const double m2 = predicted_covariance(*m, ind, ind, R).value;
    CHECK(predicted_central_moment(*m, {}, R) == 1.0);
    CHECK(predicted_central_moment(*m, {ind, ind}, R) == doctest::Approx(m2).epsilon(1e-12));
    CHECK(predicted_central_moment(*m, {ind, ind, ind}, R) == 0.0);
    CHECK(predicted_central_moment(*m, {ind, ind, ind, ind}, R) ==
          doctest::Approx(3 * m2 * m2).epsilon(1e-12));
    CHECK(predicted_central_moment(*m, std::vector<TestFunction>(6, ind), R) ==
          doctest::Approx(15 * m2 * m2 * m2).epsilon(1e-12));
    // mixed functions: m(a,a) m(b,b) + 2 m(a,b)^2
    auto g = TestFunction::gaussian(0.5, 0.2);
    const double aa = m2;
    const double bb = predicted_covariance(*m, g, g, R).value;
    const double ab = predicted_covariance(*m, ind, g, R).value;
    CHECK(predicted_central_moment(*m, {ind, ind, g, g}, R) ==
          doctest::Approx(aa * bb + 2 * ab * ab).epsilon(1e-10));
}
