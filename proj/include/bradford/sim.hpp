#pragma once

// Monte Carlo engine for the Simon-Yule generating process. One paper is
// placed per step: with probability alpha(i) it founds a new journal,
// otherwise it joins an existing journal chosen with probability
// proportional to that journal's geometrically decayed sum of past
// increments (plain size when the decay rate is 1).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "bradford/errors.hpp"
#include "bradford/model.hpp"
#include "bradford/sampling_tree.hpp"

namespace bradford {

struct ConstantEntry {
    double alpha = 0.1;
};

/// alpha(i) = alpha_start - k i with k = (alpha_start - alpha_end) / target papers.
struct LinearEntry {
    double alpha_start = 0.3;
    double alpha_end = 0.1;
};

using EntrySchedule = std::variant<ConstantEntry, LinearEntry>;

struct ConstantDecay {
    double gamma = 1.0;
};

/// gamma(i) moves linearly from gamma_start at step 0 to gamma_end at the
/// final step.
struct LinearDecay {
    double gamma_start = 0.95;
    double gamma_end = 1.0;
};

using DecaySchedule = std::variant<ConstantDecay, LinearDecay>;

struct SimConfig {
    EntrySchedule entry = ConstantEntry{};
    DecaySchedule decay = ConstantDecay{};
    std::int64_t target_papers = 10000;
    std::int64_t replications = 1;
    std::uint64_t master_seed = 0;
    unsigned threads = 1;
    /// Productivity boundary for the per-replication zone split. Defaults to
    /// ym_analytic(target_papers, rho(nominal_alpha())).
    std::optional<double> zone_boundary;

    void validate() const {
        const auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
        if (const auto* c = std::get_if<ConstantEntry>(&entry)) {
            if (!open_unit(c->alpha)) throw ValidationError("alpha: must lie in (0, 1)");
        } else {
            const auto& l = std::get<LinearEntry>(entry);
            if (!open_unit(l.alpha_start)) throw ValidationError("alpha_start: must lie in (0, 1)");
            if (!open_unit(l.alpha_end)) throw ValidationError("alpha_end: must lie in (0, 1)");
            if (l.alpha_start < l.alpha_end) throw ValidationError("alpha_start: must be >= alpha_end");
        }
        const auto decay_ok = [](double g) { return g > 0.0 && g <= 1.0; };
        if (const auto* c = std::get_if<ConstantDecay>(&decay)) {
            if (!decay_ok(c->gamma)) throw ValidationError("gamma: must lie in (0, 1]");
        } else {
            const auto& l = std::get<LinearDecay>(decay);
            if (!decay_ok(l.gamma_start)) throw ValidationError("gamma_start: must lie in (0, 1]");
            if (!decay_ok(l.gamma_end)) throw ValidationError("gamma_end: must lie in (0, 1]");
        }
        if (target_papers < 1) throw ValidationError("papers: must be >= 1");
        if (replications < 1) throw ValidationError("replications: must be >= 1");
        if (zone_boundary && !(*zone_boundary >= 1.0)) throw ValidationError("zone_boundary: must be >= 1");
    }

    /// Entry probability for paper `step` (1-based), clamped to [0, 1].
    double entry_rate(std::int64_t step) const {
        if (const auto* c = std::get_if<ConstantEntry>(&entry)) return c->alpha;
        const auto& l = std::get<LinearEntry>(entry);
        const double slope = (l.alpha_start - l.alpha_end) / static_cast<double>(target_papers);
        return std::clamp(l.alpha_start - slope * static_cast<double>(step), 0.0, 1.0);
    }

    double decay_rate(std::int64_t step) const {
        if (const auto* c = std::get_if<ConstantDecay>(&decay)) return c->gamma;
        const auto& l = std::get<LinearDecay>(decay);
        const double f = static_cast<double>(step) / static_cast<double>(target_papers);
        return std::clamp(l.gamma_start + (l.gamma_end - l.gamma_start) * f,
                          std::numeric_limits<double>::min(), 1.0);
    }

    /// Constant rate, or the schedule midpoint (alpha_start + alpha_end) / 2.
    double nominal_alpha() const {
        if (const auto* c = std::get_if<ConstantEntry>(&entry)) return c->alpha;
        const auto& l = std::get<LinearEntry>(entry);
        return 0.5 * (l.alpha_start + l.alpha_end);
    }

    double resolved_zone_boundary() const {
        if (zone_boundary) return *zone_boundary;
        return ym_analytic(static_cast<double>(target_papers), rho_from_alpha(EntryRate(nominal_alpha())));
    }
};

/// splitmix64 finalizer; used to derive independent replication seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of replication r: master ^ mix64(r). Depends only on (master, r), so
/// replications can run in any order or on any thread.
inline std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t replication) {
    return master_seed ^ mix64(replication);
}

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct JournalState {
    std::int64_t size = 0;
    double weight = 0.0;  ///< decayed increment sum, latest increment = 1
};

/// One realization of the process. Weights are stored inflated: an increment
/// at step tau is stored as prod_{s <= tau} 1/gamma(s), so relative weights
/// are exact without touching every journal each step. When the inflation
/// factor passes kRescaleThreshold all stored weights are divided by it.
class SimonYuleProcess {
public:
    static constexpr double kRescaleThreshold = 1e100;

    SimonYuleProcess(const SimConfig& config, std::uint64_t seed) : config_(config), rng_(seed) {}

    void step() {
        const std::int64_t i = papers_ + 1;
        if (i > 1) {
            inflation_ /= config_.decay_rate(i);
        }
        if (papers_ == 0 || uniform01(rng_) < config_.entry_rate(i)) {
            sizes_.push_back(1);
            weights_.push_back(inflation_);
            tree_.push_back(inflation_);
        } else {
            const std::size_t j = tree_.find(uniform01(rng_) * tree_.total());
            ++sizes_[j];
            weights_[j] += inflation_;
            tree_.add(j, inflation_);
        }
        ++papers_;
        if (inflation_ > kRescaleThreshold) {
            rescale();
        }
    }

    void run_until(std::int64_t papers) {
        while (papers_ < papers) step();
    }

    std::int64_t papers() const noexcept { return papers_; }
    std::int64_t journals() const noexcept { return static_cast<std::int64_t>(sizes_.size()); }
    std::span<const std::int64_t> sizes() const noexcept { return sizes_; }

    /// W_k = sum_j w_j(k) in units where the latest increment weighs 1.
    double total_weight() const { return tree_.total() / inflation_; }

    JournalState journal(std::size_t j) const { return {sizes_.at(j), weights_.at(j) / inflation_}; }

    std::size_t rescale_count() const noexcept { return rescales_; }

    RankedBibliography ranked() const { return RankedBibliography({sizes_.begin(), sizes_.end()}); }

    FrequencyTable frequency() const {
        std::map<std::int64_t, std::int64_t> counts;
        for (const auto s : sizes_) ++counts[s];
        FrequencyTable t;
        for (const auto& [n, c] : counts) t.add(n, static_cast<double>(c));
        return t;
    }

private:
    void rescale() {
        for (auto& w : weights_) {
            // journals idle for thousands of steps would underflow to zero
            w = std::max(w / inflation_, std::numeric_limits<double>::min());
        }
        inflation_ = 1.0;
        tree_.rebuild(weights_);
        ++rescales_;
    }

    SimConfig config_;
    std::mt19937_64 rng_;
    std::vector<std::int64_t> sizes_;
    std::vector<double> weights_;
    SamplingTree tree_;
    double inflation_ = 1.0;
    std::int64_t papers_ = 0;
    std::size_t rescales_ = 0;
};

struct ReplicationResult {
    FrequencyTable frequency;
    RankedBibliography ranked;
};

inline ReplicationResult run_replication(const SimConfig& config, std::uint64_t seed) {
    config.validate();
    SimonYuleProcess process(config, seed);
    process.run_until(config.target_papers);
    return {process.frequency(), process.ranked()};
}

/// Snapshots of a single replication after each of `checkpoints` papers
/// (ascending, each <= target_papers).
inline std::vector<RankedBibliography> run_replication_checkpoints(const SimConfig& config, std::uint64_t seed,
                                                                   std::span<const std::int64_t> checkpoints) {
    config.validate();
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) {
        throw ValidationError("checkpoints must be ascending");
    }
    SimonYuleProcess process(config, seed);
    std::vector<RankedBibliography> out;
    for (const auto c : checkpoints) {
        if (c < 1 || c > config.target_papers) {
            throw ValidationError("checkpoint outside [1, target_papers]");
        }
        process.run_until(c);
        out.push_back(process.ranked());
    }
    return out;
}

/// Paper totals for `count` observations of one growing bibliography at
/// times t = 1..count, following a unit-rate logistic centred on the middle
/// observation and ending at `target`.
inline std::vector<std::int64_t> logistic_checkpoints(std::int64_t target, int count) {
    if (count < 1 || count > target) {
        throw ValidationError("snapshots: must lie in [1, papers]");
    }
    std::vector<std::int64_t> out;
    const double mid = 0.5 * (count + 1);
    const auto share = [&](double t) { return 1.0 / (1.0 + std::exp(-(t - mid))); };
    for (int i = 1; i <= count; ++i) {
        const auto a = std::llround(static_cast<double>(target) * share(i) / share(count));
        out.push_back(std::max<std::int64_t>(out.empty() ? 1 : out.back() + 1, a));
    }
    out.back() = target;
    return out;
}

struct ZoneSplit {
    std::int64_t T0 = 0;
    std::int64_t A0 = 0;
    std::int64_t X1 = 0;
};

/// Core = journals with productivity strictly above y_m.
inline ZoneSplit empirical_zone_split(const RankedBibliography& ranked, double ym) {
    if (ranked.empty()) {
        throw ValidationError("empty bibliography has no zones");
    }
    if (!(ym >= 1.0)) {
        throw DomainError("zone boundary y_m must be >= 1");
    }
    ZoneSplit split;
    split.X1 = ranked.at_rank(1);
    for (const auto s : ranked.sizes()) {
        if (static_cast<double>(s) <= ym) break;
        ++split.T0;
        split.A0 += s;
    }
    if (split.T0 == 0) {
        throw EmptyCoreError("no journal exceeds y_m = " + std::to_string(ym));
    }
    return split;
}

struct ScalarStat {
    double mean = 0.0;
    double stddev = 0.0;
};

struct EnsembleResult {
    std::int64_t replications = 0;
    double zone_boundary = 0.0;
    FrequencyTable mean_frequency;
    std::map<std::int64_t, double> stddev_frequency;
    std::vector<double> mean_ranked;      ///< index r-1
    std::vector<double> mean_cumulative;  ///< index r-1
    ScalarStat T;
    ScalarStat A0;
    ScalarStat T0;
    ScalarStat X1;
    std::int64_t empty_core_replications = 0;
};

namespace detail {

// Integer sums keep the reduction exact, so the ensemble is identical for any
// thread count or completion order.
struct EnsembleAccumulator {
    std::vector<std::int64_t> freq_sum;
    std::vector<std::int64_t> freq_sq;
    std::vector<std::int64_t> ranked_sum;
    std::int64_t t_sum = 0, t_sq = 0;
    std::int64_t a0_sum = 0, a0_sq = 0;
    std::int64_t t0_sum = 0, t0_sq = 0;
    std::int64_t x1_sum = 0, x1_sq = 0;
    std::int64_t empty = 0;

    static void grow(std::vector<std::int64_t>& v, std::size_t n) {
        if (v.size() < n) v.resize(n, 0);
    }

    void add(const RankedBibliography& ranked, double ym) {
        const auto sizes = ranked.sizes();
        grow(ranked_sum, sizes.size());
        for (std::size_t i = 0; i < sizes.size(); ++i) ranked_sum[i] += sizes[i];

        std::vector<std::int64_t> counts;
        for (const auto s : sizes) {
            grow(counts, static_cast<std::size_t>(s) + 1);
            ++counts[static_cast<std::size_t>(s)];
        }
        grow(freq_sum, counts.size());
        grow(freq_sq, counts.size());
        for (std::size_t n = 1; n < counts.size(); ++n) {
            freq_sum[n] += counts[n];
            freq_sq[n] += counts[n] * counts[n];
        }

        const std::int64_t t = ranked.journals();
        t_sum += t;
        t_sq += t * t;
        ZoneSplit split;
        try {
            split = empirical_zone_split(ranked, ym);
        } catch (const EmptyCoreError&) {
            split.X1 = ranked.at_rank(1);
            ++empty;
        }
        a0_sum += split.A0;
        a0_sq += split.A0 * split.A0;
        t0_sum += split.T0;
        t0_sq += split.T0 * split.T0;
        x1_sum += split.X1;
        x1_sq += split.X1 * split.X1;
    }

    void merge(const EnsembleAccumulator& o) {
        const auto merge_vec = [](std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
            grow(a, b.size());
            for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
        };
        merge_vec(freq_sum, o.freq_sum);
        merge_vec(freq_sq, o.freq_sq);
        merge_vec(ranked_sum, o.ranked_sum);
        t_sum += o.t_sum;
        t_sq += o.t_sq;
        a0_sum += o.a0_sum;
        a0_sq += o.a0_sq;
        t0_sum += o.t0_sum;
        t0_sq += o.t0_sq;
        x1_sum += o.x1_sum;
        x1_sq += o.x1_sq;
        empty += o.empty;
    }
};

inline ScalarStat scalar_stat(std::int64_t sum, std::int64_t sq, std::int64_t n) {
    const double nd = static_cast<double>(n);
    const double mean = static_cast<double>(sum) / nd;
    if (n < 2) return {mean, 0.0};
    const double var = (static_cast<double>(sq) - nd * mean * mean) / (nd - 1.0);
    return {mean, std::sqrt(std::max(var, 0.0))};
}

} // namespace detail

inline EnsembleResult run_ensemble(const SimConfig& config) {
    config.validate();
    const double ym = config.resolved_zone_boundary();
    const std::int64_t reps = config.replications;
    const unsigned workers = static_cast<unsigned>(
        std::clamp<std::int64_t>(config.threads == 0 ? 1 : config.threads, 1, reps));

    std::vector<detail::EnsembleAccumulator> partial(workers);
    const auto work = [&](unsigned w) {
        for (std::int64_t r = w; r < reps; r += workers) {
            SimonYuleProcess process(config, replication_seed(config.master_seed, static_cast<std::uint64_t>(r)));
            process.run_until(config.target_papers);
            partial[w].add(process.ranked(), ym);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    detail::EnsembleAccumulator acc;
    for (const auto& p : partial) acc.merge(p);

    const double nd = static_cast<double>(reps);
    EnsembleResult out;
    out.replications = reps;
    out.zone_boundary = ym;
    for (std::size_t n = 1; n < acc.freq_sum.size(); ++n) {
        if (acc.freq_sum[n] == 0) continue;
        const auto stat = detail::scalar_stat(acc.freq_sum[n], acc.freq_sq[n], reps);
        out.mean_frequency.add(static_cast<std::int64_t>(n), stat.mean);
        out.stddev_frequency[static_cast<std::int64_t>(n)] = stat.stddev;
    }
    out.mean_ranked.reserve(acc.ranked_sum.size());
    double running = 0.0;
    for (const auto s : acc.ranked_sum) {
        const double m = static_cast<double>(s) / nd;
        out.mean_ranked.push_back(m);
        running += m;
        out.mean_cumulative.push_back(running);
    }
    out.T = detail::scalar_stat(acc.t_sum, acc.t_sq, reps);
    out.A0 = detail::scalar_stat(acc.a0_sum, acc.a0_sq, reps);
    out.T0 = detail::scalar_stat(acc.t0_sum, acc.t0_sq, reps);
    out.X1 = detail::scalar_stat(acc.x1_sum, acc.x1_sq, reps);
    out.empty_core_replications = acc.empty;
    return out;
}

} // namespace bradford
