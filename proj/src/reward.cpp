#include "lrsched/reward.hpp"

#include <cmath>
#include <cstdlib>

#include "lrsched/errors.hpp"

namespace lrsched {

void RewardParams::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw DomainError("RewardParams: beta must be positive");
    if (!(gamma > 0.0) || !(gamma <= 1.0))
        throw DomainError("RewardParams: gamma must be in (0, 1]");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw DomainError("RewardParams: dt must be positive");
    if (!(horizon_T >= dt))
        throw DomainError("RewardParams: horizon_T must be at least dt");
    const double steps = horizon_T / dt;
    if (std::fabs(steps - std::llround(steps)) > 1e-9)
        throw DomainError("RewardParams: horizon_T/dt is not a whole number of steps");
}

std::size_t RewardParams::step_count() const {
    validate();
    return static_cast<std::size_t>(std::llround(horizon_T / dt));
}

void Schedule::validate() const {
    if (!(dt > 0.0)) throw DomainError("Schedule: dt must be positive");
    for (double v : values)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw DomainError("Schedule: values must be finite and nonnegative");
}

void Trajectory::validate() const {
    if (performance.empty()) throw DomainError("Trajectory: empty");
    if (!(dt > 0.0)) throw DomainError("Trajectory: dt must be positive");
    for (double v : performance)
        if (!std::isfinite(v)) throw DomainError("Trajectory: non-finite value");
}

double internal_reward_rate(double p_t, double mu_t, const RewardParams& params) {
    if (!std::isfinite(p_t) || !std::isfinite(mu_t))
        throw DomainError("internal_reward_rate: non-finite input");
    if (mu_t < 0.0) throw DomainError("internal_reward_rate: negative learning rate");
    params.validate();
    return p_t - params.beta * mu_t * mu_t;
}

double cumulative_reward(const Trajectory& traj, const Schedule& sched,
                         const RewardParams& params) {
    params.validate();
    if (traj.size() != sched.size() + 1)
        throw ContractError("cumulative_reward: trajectory must have schedule length + 1 entries");
    if (traj.dt != sched.dt)
        throw ContractError("cumulative_reward: trajectory and schedule dt differ");
    const double log_gamma = std::log(params.gamma);  // exactly 0 for gamma == 1
    const double beta = params.beta;
    const double dt = sched.dt;
    double acc = 0.0;
    for (std::size_t i = 0; i < sched.size(); ++i) {
        const double w = std::exp(static_cast<double>(i) * dt * log_gamma);
        const double mu = sched.values[i];
        acc += dt * w * (traj.performance[i] - beta * mu * mu);
    }
    return acc;
}

double total_effort(const Schedule& sched, const RewardParams& params) {
    params.validate();
    sched.validate();
    double acc = 0.0;
    for (double mu : sched.values) acc += mu * mu;
    return sched.dt * params.beta * acc;
}

}  // namespace lrsched
