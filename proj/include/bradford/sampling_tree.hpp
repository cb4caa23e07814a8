#pragma once

#include <bit>
#include <cstddef>
#include <span>
#include <vector>

namespace bradford {

/// Binary indexed tree over non-negative weights. Supports append, point
/// increment and "which item does a uniform draw over the total land on" in
/// O(log n).
class SamplingTree {
public:
    std::size_t size() const noexcept { return tree_.size(); }

    void push_back(double weight) {
        const std::size_t i = tree_.size() + 1;  // 1-based slot
        const std::size_t low = i & (~i + 1);
        // slot i covers (i - low, i]
        tree_.push_back(weight + prefix(i - 1) - prefix(i - low));
    }

    void add(std::size_t index, double delta) {
        for (std::size_t i = index + 1; i <= tree_.size(); i += i & (~i + 1)) {
            tree_[i - 1] += delta;
        }
    }

    /// Sum of weights [0, count).
    double prefix(std::size_t count) const {
        double sum = 0.0;
        for (std::size_t i = count; i > 0; i -= i & (~i + 1)) {
            sum += tree_[i - 1];
        }
        return sum;
    }

    double total() const { return prefix(tree_.size()); }

    /// Smallest index j with prefix(j + 1) > target, for target in [0, total).
    std::size_t find(double target) const {
        std::size_t pos = 0;
        for (std::size_t step = std::bit_floor(tree_.size()); step != 0; step >>= 1) {
            const std::size_t next = pos + step;
            if (next <= tree_.size() && tree_[next - 1] <= target) {
                pos = next;
                target -= tree_[next - 1];
            }
        }
        // rounding can push a draw just past the last positive weight
        return pos < tree_.size() ? pos : tree_.size() - 1;
    }

    /// Replace all weights, O(n).
    void rebuild(std::span<const double> weights) {
        tree_.assign(weights.begin(), weights.end());
        for (std::size_t i = 1; i <= tree_.size(); ++i) {
            const std::size_t parent = i + (i & (~i + 1));
            if (parent <= tree_.size()) {
                tree_[parent - 1] += tree_[i - 1];
            }
        }
    }

private:
    std::vector<double> tree_;
};

} // namespace bradford
