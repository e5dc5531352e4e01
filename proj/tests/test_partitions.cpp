#include "doctest.h"

#include "gausszeros/errors.hpp"
#include "gausszeros/partitions.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace gausszeros;

using Subsets = std::vector<std::vector<int>>;

TEST_CASE("Bell and pair-partition counts") {
    const long long bell[] = {1, 2, 5, 15, 52, 203, 877, 4140};
    for (int n = 1; n <= 8; ++n) {
        CHECK(bell_number(n) == bell[n - 1]);
        CHECK(static_cast<long long>(enumerate_partitions(n).size()) == bell[n - 1]);
    }
    const long long pairs[] = {1, 0, 3, 0, 15, 0, 105, 0, 945};
    for (int n = 2; n <= 10; ++n) {
        CHECK(pair_partition_count(n) == pairs[n - 2]);
        CHECK(static_cast<long long>(enumerate_pair_partitions(n).size()) == pairs[n - 2]);
    }
    CHECK_THROWS_AS(enumerate_partitions(9), SizeCap);
    CHECK_THROWS_AS(enumerate_partitions(0), SizeCap);
    CHECK_THROWS_AS(enumerate_pair_partitions(12), SizeCap);
}

TEST_CASE("enumerated partitions are distinct and canonical") {
    for (int n = 1; n <= 6; ++n) {
        auto all = enumerate_partitions(n);
        std::set<std::string> seen;
        for (const auto& p : all) {
            CHECK(p.ground_size() == n);
            seen.insert(p.to_string());
            for (std::size_t b = 1; b < p.blocks().size(); ++b)
                CHECK(p.blocks()[b - 1].front() < p.blocks()[b].front());
        }
        CHECK(seen.size() == all.size());
    }
    for (const auto& p : enumerate_pair_partitions(6))
        for (const auto& b : p.blocks()) CHECK(b.size() == 2);
}

TEST_CASE("partition parsing and validation") {
    auto p = IndexPartition::parse("{2},{1,0}");
    CHECK(p.to_string() == "{0,1},{2}");
    CHECK(p.block_of(2) == 1);
    CHECK(p.max_block_size() == 2);
    CHECK(p == IndexPartition({{0, 1}, {2}}));
    CHECK_THROWS(IndexPartition::parse("{0,1},{1,2}"));
    CHECK_THROWS(IndexPartition::parse("{0},{2}"));
    CHECK_THROWS(IndexPartition::parse("{0,x}"));
}

TEST_CASE("cluster partitions") {
    // two chains at gap 0.2 and an isolated point
    const std::vector<double> x{-1.0, -0.8, 1.0, -0.6, 0.0, 0.8};
    CHECK(cluster_partition(x, 0.5).to_string() == "{0,1,3},{2,5},{4}");
    CHECK(cluster_partition({0.0, 1.0, 2.5}, 0.0) == IndexPartition::singletons(3));
    CHECK(cluster_partition({0.0, 1.0, 2.5}, 2.5) == IndexPartition::one_block(3));
    CHECK(cluster_partition({3.0, 3.0, 7.0}, 0.0).to_string() == "{0,1},{2}");
}

TEST_CASE("refinement order") {
    auto s = IndexPartition::singletons(3);
    auto one = IndexPartition::one_block(3);
    auto a = IndexPartition::parse("{0,1},{2}");
    auto b = IndexPartition::parse("{0,2},{1}");
    CHECK(partition_leq(s, a));
    CHECK(partition_leq(a, one));
    CHECK_FALSE(partition_leq(a, b));
    CHECK_FALSE(partition_leq(b, a));
    CHECK_FALSE(partition_leq(one, a));
    CHECK_THROWS_AS(partition_leq(s, IndexPartition::singletons(4)), GroundSetMismatch);
}

TEST_CASE("cluster partition is monotone in eta and blocks do not interlace") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 6);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> x(2 + trial % 5);
        for (auto& t : x) t = u(rng);
        const double e1 = u(rng) / 3, e2 = e1 + u(rng) / 3;
        const auto p1 = cluster_partition(x, e1), p2 = cluster_partition(x, e2);
        CHECK(partition_leq(p1, p2));
        for (std::size_t i = 0; i < p1.size(); ++i)
            for (std::size_t j = 0; j < p1.size(); ++j) {
                if (i == j) continue;
                double imin = 1e300, imax = -1e300, jmin = 1e300, jmax = -1e300;
                for (int a : p1.blocks()[i]) imin = std::min(imin, x[a]), imax = std::max(imax, x[a]);
                for (int a : p1.blocks()[j]) jmin = std::min(jmin, x[a]), jmax = std::max(jmax, x[a]);
                CHECK((jmin > imax + e1 || imin > jmax + e1));
            }
    }
}

TEST_CASE("adapted subsets") {
    CHECK(adapted_subsets(2, IndexPartition::singletons(2)) == Subsets{{}, {0}, {1}, {0, 1}});
    CHECK(adapted_subsets(2, IndexPartition::one_block(2)) == Subsets{{0, 1}});
    CHECK(adapted_subsets(3, IndexPartition::parse("{0,1},{2}")) == Subsets{{0, 1}, {0, 1, 2}});
    for (int n = 1; n <= 6; ++n)
        for (const auto& p : enumerate_partitions(n)) {
            int singles = 0;
            for (const auto& b : p.blocks()) singles += b.size() == 1;
            CHECK(adapted_subsets(n, p).size() == (std::size_t(1) << singles));
        }
}
