#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace gausszeros {

// Blocks sorted ascending internally and ordered by their minimum.
class IndexPartition {
public:
    IndexPartition() = default;
    explicit IndexPartition(std::vector<std::vector<int>> blocks);

    static IndexPartition singletons(int n);
    static IndexPartition one_block(int n);
    // "{0,1},{2}" style, whitespace tolerated
    static IndexPartition parse(const std::string& text);

    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    std::size_t size() const { return blocks_.size(); }
    int ground_size() const { return n_; }
    int max_block_size() const;
    // index of the block holding element i
    int block_of(int i) const;

    std::string to_string() const;
    std::size_t hash() const;
    bool operator==(const IndexPartition& o) const { return blocks_ == o.blocks_; }

private:
    std::vector<std::vector<int>> blocks_;
    int n_ = 0;
};

struct IndexPartitionHash {
    std::size_t operator()(const IndexPartition& p) const { return p.hash(); }
};

std::vector<IndexPartition> enumerate_partitions(int n);
std::vector<IndexPartition> enumerate_pair_partitions(int n);
long long bell_number(int n);
// 2^{-n/2} n! / (n/2)! for even n, 0 otherwise
long long pair_partition_count(int n);

// Connected components of the graph joining |x_i - x_j| <= eta.
IndexPartition cluster_partition(const std::vector<double>& x, double eta);

bool partition_leq(const IndexPartition& fine, const IndexPartition& coarse);

// All B in {0..n-1} containing every non-singleton block, as sorted index lists.
std::vector<std::vector<int>> adapted_subsets(int n, const IndexPartition& partition);

}  // namespace gausszeros
