#pragma once

#include <cstddef>
#include <vector>

namespace lrsched {

// Constants of the control objective: effort cost, discount, horizon, step.
struct RewardParams {
    double beta = 1.0;       // effort-cost coefficient
    double gamma = 1.0;      // discount in (0, 1]
    double horizon_T = 1.0;  // episode length
    double dt = 1e-2;        // Euler step

    void validate() const;
    // Number of Euler steps; horizon_T/dt must be whole within 1e-9.
    std::size_t step_count() const;
};

// The control signal: one learning-rate value per Euler step.
struct Schedule {
    double dt = 0.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    void validate() const;
};

// Performance over one learning episode. An N-step episode carries N+1
// entries: P at t = 0, dt, ..., N*dt inclusive. Entry i maps to time i*dt.
struct Trajectory {
    double dt = 0.0;
    std::vector<double> performance;

    std::size_t size() const { return performance.size(); }
    double final_performance() const { return performance.back(); }
    void validate() const;
};

// Instantaneous internal reward: P - beta * mu^2.
double internal_reward_rate(double p_t, double mu_t, const RewardParams& params);

// Discounted left-Riemann quadrature of the internal reward over the episode.
// Requires traj.size() == sched.size() + 1 (the trajectory carries the
// endpoint sample); the sum runs over the schedule's steps.
double cumulative_reward(const Trajectory& traj, const Schedule& sched,
                         const RewardParams& params);

// Undiscounted cumulative cost dt * sum beta * mu_i^2.
double total_effort(const Schedule& sched, const RewardParams& params);

}  // namespace lrsched
