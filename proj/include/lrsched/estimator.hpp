#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "lrsched/reward.hpp"

namespace lrsched {

struct EstimatorConfig {
    double rho = 1.0;      // recency decay in (0, 1]
    double sigma_k = 0.1;  // kernel width
    double dt = 1e-3;
    std::size_t capacity = 0;  // FIFO cap; 0 = unbounded

    void validate() const;
};

// Per-trajectory mean/variance normalization: (P - mean) / max(std, 1e-12).
Trajectory whiten(const Trajectory& traj);

// Gaussian kernel over the first upto_steps points of two already-whitened
// trajectories:
//   exp(-(1/(2 N sigma_k^2)) sum_{i<N} rho^{dt (N-i)} (Po_i - Ph_i)^2), N = upto_steps.
// upto_steps == 0 yields 1 (zero observed distance).
double kernel_similarity(const Trajectory& observed, const Trajectory& stored,
                         std::size_t upto_steps, const EstimatorConfig& cfg);

// Ordered collection of completed, equal-length episodes.
class MemoryStore {
public:
    explicit MemoryStore(EstimatorConfig cfg) : cfg_(std::move(cfg)) {
        cfg_.validate();
    }

    void commit(Trajectory traj);
    std::size_t size() const { return episodes_.size(); }
    bool empty() const { return episodes_.empty(); }
    const Trajectory& episode(std::size_t h) const { return episodes_[h]; }
    const EstimatorConfig& config() const { return cfg_; }

    // Line-delimited numeric container: header with dt, episode length and
    // count, then one row of values per episode.
    void save(const std::filesystem::path& path) const;
    static MemoryStore load(const std::filesystem::path& path,
                            EstimatorConfig cfg);

private:
    std::vector<Trajectory> episodes_;
    EstimatorConfig cfg_;
};

struct Estimate {
    double p_final = 0.0;
    std::vector<double> weights;  // simplex over stored episodes
};

// Kernel-weighted extrapolation of the final performance. The leading
// upto_steps points of the observed and each stored trajectory are whitened,
// compared, and the raw stored finals averaged under the normalized kernel
// weights. upto_steps == 0 returns the uniform average.
Estimate estimate_final_performance(const MemoryStore& store,
                                    const Trajectory& observed,
                                    std::size_t upto_steps);

}  // namespace lrsched
