#pragma once

#include <functional>

#include "lrsched/model.hpp"
#include "lrsched/reward.hpp"

namespace lrsched {

// Loss magnitude beyond which training is declared diverged.
inline constexpr double kDivergenceGuard = 1e12;

struct EpisodeResult {
    Trajectory trajectory;  // P at t = 0..T inclusive (schedule length + 1)
    Weights final_weights;
};

// Explicit-Euler gradient flow under a fixed schedule:
//   w <- w - dt * (mu_k + base_rate) * dL/dw
// Performance is the shifted loss P = L(w0, full data) - L(w); per-step
// entries use the step's batch, the final entry the full dataset.
EpisodeResult simulate_episode(const ModelSpec& spec, const Weights& w0,
                               const TaskData& data, const Schedule& sched,
                               double base_rate = 0.0);

// State-feedback rule mu(P_t, t), queried at each step start.
using Controller = std::function<double(double p_t, double t)>;

struct ClosedLoopResult {
    Trajectory trajectory;
    Schedule realized;  // the costed control mu_k, excluding base_rate
    Weights final_weights;
};

ClosedLoopResult run_closed_loop_episode(const ModelSpec& spec, const Weights& w0,
                                         const TaskData& data,
                                         const Controller& controller,
                                         const RewardParams& params,
                                         double base_rate = 0.0);

}  // namespace lrsched
