#include "gausszeros/partitions.hpp"

#include "gausszeros/errors.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace gausszeros {

IndexPartition::IndexPartition(std::vector<std::vector<int>> blocks) : blocks_(std::move(blocks)) {
    std::vector<int> seen;
    for (auto& b : blocks_) {
        if (b.empty()) throw ConfigError("partition has an empty block");
        std::sort(b.begin(), b.end());
        seen.insert(seen.end(), b.begin(), b.end());
    }
    std::sort(blocks_.begin(), blocks_.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    std::sort(seen.begin(), seen.end());
    n_ = static_cast<int>(seen.size());
    for (int i = 0; i < n_; ++i)
        if (seen[i] != i)
            throw ConfigError("partition blocks must be disjoint and cover 0.." + std::to_string(n_ - 1));
}

IndexPartition IndexPartition::singletons(int n) {
    std::vector<std::vector<int>> b(n);
    for (int i = 0; i < n; ++i) b[i] = {i};
    return IndexPartition(std::move(b));
}

IndexPartition IndexPartition::one_block(int n) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    return IndexPartition({all});
}

IndexPartition IndexPartition::parse(const std::string& text) {
    std::vector<std::vector<int>> blocks;
    std::vector<int>* cur = nullptr;
    std::string num;
    auto flush = [&] {
        if (num.empty()) return;
        if (!cur) throw ConfigError("partition '" + text + "': number outside braces");
        cur->push_back(std::stoi(num));
        num.clear();
    };
    for (char ch : text) {
        if (ch == '{') {
            if (cur) throw ConfigError("partition '" + text + "': nested braces");
            blocks.emplace_back();
            cur = &blocks.back();
        } else if (ch == '}') {
            flush();
            if (!cur) throw ConfigError("partition '" + text + "': unbalanced braces");
            cur = nullptr;
        } else if (ch == ',' || ch == ' ') {
            flush();
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            num += ch;
        } else {
            throw ConfigError("partition '" + text + "': unexpected character");
        }
    }
    if (cur) throw ConfigError("partition '" + text + "': unbalanced braces");
    return IndexPartition(std::move(blocks));
}

int IndexPartition::max_block_size() const {
    std::size_t m = 0;
    for (const auto& b : blocks_) m = std::max(m, b.size());
    return static_cast<int>(m);
}

int IndexPartition::block_of(int i) const {
    for (std::size_t b = 0; b < blocks_.size(); ++b)
        if (std::find(blocks_[b].begin(), blocks_[b].end(), i) != blocks_[b].end())
            return static_cast<int>(b);
    return -1;
}

std::string IndexPartition::to_string() const {
    std::ostringstream os;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        if (b) os << ',';
        os << '{';
        for (std::size_t i = 0; i < blocks_[b].size(); ++i) os << (i ? "," : "") << blocks_[b][i];
        os << '}';
    }
    return os.str();
}

std::size_t IndexPartition::hash() const {
    // label each element by the minimum of its block
    std::size_t h = 1469598103934665603ull;
    std::vector<int> label(n_);
    for (const auto& b : blocks_)
        for (int i : b) label[i] = b.front();
    for (int v : label) h = (h ^ static_cast<std::size_t>(v + 1)) * 1099511628211ull;
    return h;
}

long long bell_number(int n) {
    // Bell triangle
    std::vector<long long> row{1};
    for (int i = 1; i <= n; ++i) {
        std::vector<long long> next{row.back()};
        for (long long v : row) next.push_back(next.back() + v);
        row.swap(next);
    }
    return row.front();
}

long long pair_partition_count(int n) {
    if (n % 2) return 0;
    long long r = 1;
    for (int k = n - 1; k > 0; k -= 2) r *= k;
    return r;
}

std::vector<IndexPartition> enumerate_partitions(int n) {
    if (n < 1 || n > 8) throw SizeCap("enumerate_partitions supports 1 <= n <= 8");
    // restricted growth strings, lexicographic
    std::vector<IndexPartition> out;
    std::vector<int> a(n, 0);
    while (true) {
        int nb = *std::max_element(a.begin(), a.end()) + 1;
        std::vector<std::vector<int>> blocks(nb);
        for (int i = 0; i < n; ++i) blocks[a[i]].push_back(i);
        out.emplace_back(std::move(blocks));
        int i = n - 1;
        for (; i > 0; --i) {
            const int m = *std::max_element(a.begin(), a.begin() + i);
            if (a[i] <= m) break;
        }
        if (i == 0) break;
        ++a[i];
        std::fill(a.begin() + i + 1, a.end(), 0);
    }
    return out;
}

std::vector<IndexPartition> enumerate_pair_partitions(int n) {
    if (n < 1 || n > 10) throw SizeCap("enumerate_pair_partitions supports 1 <= n <= 10");
    std::vector<IndexPartition> out;
    if (n % 2) return out;
    std::vector<std::vector<int>> cur;
    std::vector<bool> used(n, false);
    std::function<void()> rec = [&] {
        int first = -1;
        for (int i = 0; i < n; ++i)
            if (!used[i]) {
                first = i;
                break;
            }
        if (first < 0) {
            out.emplace_back(cur);
            return;
        }
        used[first] = true;
        for (int j = first + 1; j < n; ++j) {
            if (used[j]) continue;
            used[j] = true;
            cur.push_back({first, j});
            rec();
            cur.pop_back();
            used[j] = false;
        }
        used[first] = false;
    };
    rec();
    return out;
}

IndexPartition cluster_partition(const std::vector<double>& x, double eta) {
    const int n = static_cast<int>(x.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(x[i] - x[j]) <= eta) parent[find(i)] = find(j);
    std::vector<std::vector<int>> blocks;
    std::vector<int> slot(n, -1);
    for (int i = 0; i < n; ++i) {
        const int r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(blocks.size());
            blocks.emplace_back();
        }
        blocks[slot[r]].push_back(i);
    }
    return IndexPartition(std::move(blocks));
}

bool partition_leq(const IndexPartition& fine, const IndexPartition& coarse) {
    if (fine.ground_size() != coarse.ground_size())
        throw GroundSetMismatch("partition_leq: partitions of different ground sets");
    for (const auto& b : fine.blocks()) {
        const int home = coarse.block_of(b.front());
        for (int i : b)
            if (coarse.block_of(i) != home) return false;
    }
    return true;
}

std::vector<std::vector<int>> adapted_subsets(int n, const IndexPartition& partition) {
    if (partition.ground_size() != n)
        throw GroundSetMismatch("adapted_subsets: partition is not over 0.." + std::to_string(n - 1));
    std::vector<int> required, free;
    for (const auto& b : partition.blocks()) {
        if (b.size() >= 2) required.insert(required.end(), b.begin(), b.end());
        else free.push_back(b.front());
    }
    std::vector<std::vector<int>> out;
    const std::size_t nf = free.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << nf); ++mask) {
        std::vector<int> s = required;
        for (std::size_t i = 0; i < nf; ++i)
            if (mask >> i & 1) s.push_back(free[i]);
        std::sort(s.begin(), s.end());
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    return out;
}

}  // namespace gausszeros
