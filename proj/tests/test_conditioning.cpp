#include "doctest.h"

#include "gausszeros/conditioning.hpp"
#include "gausszeros/errors.hpp"
#include "gausszeros/partitions.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace gausszeros;

namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix<double>& m) {
    Eigen::MatrixXd e(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
    return e;
}

DenseMatrix<double> from_eigen(const Eigen::MatrixXd& e) {
    DenseMatrix<double> m(e.rows(), e.cols());
    for (int i = 0; i < e.rows(); ++i)
        for (int j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
    return m;
}

DenseMatrix<double> mat(std::size_t r, std::size_t c, std::vector<double> v) {
    DenseMatrix<double> m(r, c);
    m.data = std::move(v);
    return m;
}

MonteCarloSpec small_mc(std::uint64_t samples = 200000) {
    MonteCarloSpec mc;
    mc.samples = samples;
    return mc;
}

}  // namespace

TEST_CASE("single point context") {
    auto bf = make_preset("bargmann-fock");
    auto c = assemble_context(*bf, {0.7}, IndexPartition::singletons(1));
    CHECK(c.theta(0, 0) == doctest::Approx(1.0));
    CHECK(c.omega(0, 0) == doctest::Approx(1.0));
    CHECK(std::abs(c.xi(0, 0)) < 1e-15);
    REQUIRE(c.has_lambda);
    CHECK(c.lambda(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("two point determinant and the confluent limit") {
    for (auto name : {"bargmann-fock", "cauchy", "sinc"}) {
        auto m = make_preset(name);
        for (double z : {0.01, 0.3, 1.0, 4.0, 10.0}) {
            double k[1];
            m->derivs(z, 0, k);
            auto c = assemble_context(*m, {0.0, z}, IndexPartition::singletons(2), false);
            CHECK(c.d_value == doctest::Approx(1 - k[0] * k[0]).epsilon(1e-10).scale(1e-10));
        }
        auto c = assemble_context(*m, {0.0, 1e-7}, IndexPartition::one_block(2));
        CHECK(c.theta(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(c.theta(1, 1) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(std::abs(c.theta(0, 1)) < 1e-6);
    }
}

TEST_CASE("degenerate partitions are reported") {
    auto bf = make_preset("bargmann-fock");
    CHECK_THROWS_AS(assemble_context(*bf, {0.0, 0.0}, IndexPartition::singletons(2)), DegenerateConfiguration);
    auto c = assemble_context(*bf, {0.0, 0.0}, IndexPartition::one_block(2));
    CHECK(c.d_value > 0);
}

TEST_CASE("context invariants on random configurations") {
    auto sinc = make_preset("sinc");
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int trial = 0; trial < 60; ++trial) {
        Configuration x(2 + trial % 3);
        for (auto& t : x) t = u(rng);
        const auto part = cluster_partition(x, 1.0);
        auto c = assemble_context(*sinc, x, part);
        const int n = static_cast<int>(x.size());
        const double bound = tail_norm(*sinc, 2 * n, 0.0);
        const auto th = to_eigen(c.theta), om = to_eigen(c.omega), xi = to_eigen(c.xi);
        CHECK((th - th.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((om - om.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(th.cwiseAbs().maxCoeff() <= bound * (1 + 1e-9));
        CHECK(xi.cwiseAbs().maxCoeff() <= bound * (1 + 1e-9));
        CHECK(om.cwiseAbs().maxCoeff() <= bound * (1 + 1e-9));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(c.lambda));
        CHECK(es.eigenvalues().minCoeff() >= -1e-10 * om.trace());
        // translation invariance
        Configuration y = x;
        for (auto& t : y) t += 3.25;
        auto d = assemble_context(*sinc, y, part);
        CHECK((to_eigen(d.theta) - th).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((to_eigen(d.xi) - xi).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((to_eigen(d.omega) - om).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("off-diagonal blocks decay with the cluster gap") {
    auto bf = make_preset("bargmann-fock");
    for (double gap : {1.5, 3.0, 5.0}) {
        Configuration x{0.0, 0.4, 0.4 + gap, 0.9 + gap};
        auto part = IndexPartition::parse("{0,1},{2,3}");
        auto c = assemble_context(*bf, x, part);
        const double bound = tail_norm(*bf, 4, gap);
        for (int i : {0, 1})
            for (int j : {2, 3}) {
                CHECK(std::abs(c.theta(i, j)) <= bound * (1 + 1e-9));
                CHECK(std::abs(c.xi(i, j)) <= bound * (1 + 1e-9));
                CHECK(std::abs(c.xi(j, i)) <= bound * (1 + 1e-9));
                CHECK(std::abs(c.omega(i, j)) <= bound * (1 + 1e-9));
            }
    }
}

TEST_CASE("pi_k closed forms and examples") {
    const double c1 = std::sqrt(2 / std::numbers::pi);
    CHECK(pi_k(from_eigen(Eigen::MatrixXd::Identity(1, 1))).value == doctest::Approx(c1).epsilon(1e-15));
    CHECK(pi_k(from_eigen(4.0 * Eigen::MatrixXd::Identity(1, 1))).value == doctest::Approx(2 * c1));
    CHECK(pi_k(from_eigen(Eigen::MatrixXd::Identity(2, 2))).value == doctest::Approx(2 / std::numbers::pi));
    CHECK(pi_k(from_eigen(Eigen::MatrixXd::Ones(2, 2))).value == doctest::Approx(1.0).epsilon(1e-14));
    for (int k : {3, 4, 5}) {
        auto r = pi_k(from_eigen(Eigen::MatrixXd::Identity(k, k)), small_mc());
        CHECK(r.value == doctest::Approx(std::pow(2 / std::numbers::pi, k / 2.0)).epsilon(1e-12));
    }
    Eigen::MatrixXd bad(2, 2);
    bad << 1, 2, 2, 1;
    CHECK_THROWS_AS(pi_k(from_eigen(bad)), NotPSD);
}

TEST_CASE("pi_3 Monte Carlo against an independent estimate") {
    // E|X1 X2 X3| for this matrix from a separate 4e7-sample run: 0.641718 +- 0.00019
    Eigen::MatrixXd u(3, 3);
    u << 1.0, 0.6, -0.3, 0.6, 1.5, 0.2, -0.3, 0.2, 0.8;
    auto r = pi_k(from_eigen(u), small_mc(1000000));
    CHECK(r.std_error > 0);
    CHECK(std::abs(r.value - 0.641718) < 3 * std::hypot(r.std_error, 0.00019));
}

TEST_CASE("pi_k is independent of the thread count") {
    Eigen::MatrixXd u(4, 4);
    u << 2.0, 0.5, 0.1, -0.4, 0.5, 1.0, 0.3, 0.0, 0.1, 0.3, 1.2, 0.6, -0.4, 0.0, 0.6, 0.9;
    auto mc1 = small_mc(300000), mc3 = small_mc(300000);
    mc1.threads = 1;
    mc3.threads = 3;
    auto a = pi_k(from_eigen(u), mc1), b = pi_k(from_eigen(u), mc3);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
}

TEST_CASE("absolute moments") {
    // E|Z|^2 for Var = 2; E|X|^2|Y|^2 = s11 s22 + 2 s12^2
    DenseMatrix<Extended> v(1, 1);
    v(0, 0) = 2;
    CHECK(static_cast<double>(abs_moment(v, {2}).value) == doctest::Approx(2.0));
    DenseMatrix<Extended> w(2, 2);
    w(0, 0) = 1.5;
    w(1, 1) = 0.5;
    w(0, 1) = w(1, 0) = 0.25;
    CHECK(static_cast<double>(abs_moment(w, {2, 2}).value) == doctest::Approx(1.5 * 0.5 + 2 * 0.0625));
    CHECK(static_cast<double>(abs_moment(w, {1, 1}).value) ==
          doctest::Approx(pi_k(mat(2, 2, {1.5, 0.25, 0.25, 0.5})).value));
}

TEST_CASE("holder constant and sup norm") {
    CHECK(holder_constant(2) > 0);
    CHECK(holder_constant(3) > holder_constant(2));
    CHECK(sup_norm(mat(2, 2, {1.0, -3.0, 0.5, 2.0})) == 3.0);
}
