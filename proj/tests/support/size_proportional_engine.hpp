#pragma once

// Reference engine for the undecayed process: a journal is chosen with
// probability proportional to its size by a linear scan over integer sizes.
// It consumes random draws in the same order as SimonYuleProcess, so with
// gamma = 1 both engines must agree exactly.

#include <cstdint>
#include <random>
#include <vector>

#include "bradford/sim.hpp"

namespace test_support {

inline std::vector<std::int64_t> size_proportional_run(const bradford::SimConfig& config, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::int64_t> sizes;
    std::int64_t total = 0;
    for (std::int64_t i = 1; i <= config.target_papers; ++i) {
        if (i == 1 || bradford::uniform01(rng) < config.entry_rate(i)) {
            sizes.push_back(1);
        } else {
            const double u = bradford::uniform01(rng) * static_cast<double>(total);
            std::int64_t cumulative = 0;
            std::size_t j = 0;
            for (; j < sizes.size(); ++j) {
                cumulative += sizes[j];
                if (static_cast<double>(cumulative) > u) break;
            }
            ++sizes[j];
        }
        ++total;
    }
    return sizes;
}

} // namespace test_support
