#pragma once

#include <cstddef>
#include <optional>

#include "lrsched/reward.hpp"

namespace lrsched {

// Square-root gap rule: mu = sqrt((P_hat_T - P_t)/beta), with the optional
// cost-free base rate alpha of the passive-learning variant.
struct ClosedLoopConfig {
    double beta = 1.0;
    double p_final_estimate = 0.0;
    double alpha = 0.0;
    bool clamp_negative = true;

    void validate() const;
};

double mu_closed_loop(double p_t, const ClosedLoopConfig& cfg);

// Single-layer linear regression setup for the open-loop solution.
struct PerceptronTask {
    double sigma2 = 1.0;  // input variance
    double d = 0.0;       // initial weight distance ||w* - w0||
    double beta = 1.0;
    double T = 1.0;

    void validate() const;
};

// Open-loop schedule mu(t) = theta * tan(sigma^2 * theta * (T - t)) with the
// self-consistent amplitude theta = (sigma*d/sqrt(2 beta)) * cos(sigma^2 theta T).
struct OpenLoopSolution {
    double theta = 0.0;
    PerceptronTask task;

    // Loss along the optimal trajectory, (sigma^2/2) d^2 e^{-2 sigma^2 M(t)}.
    double analytic_loss(double t) const;
    double initial_loss() const { return analytic_loss(0.0); }
    // Final shifted performance P(T) = L(0) - L(T).
    double final_performance() const { return initial_loss() - analytic_loss(task.T); }
};

// Smallest nonnegative root of theta - (sigma d / sqrt(2 beta)) cos(sigma^2 theta T)
// by bisection; |f| <= 1e-12 at the returned root.
OpenLoopSolution solve_theta(const PerceptronTask& task);

double mu_open_loop(double t, const OpenLoopSolution& sol);

// Leading-order discounted approximation:
// mu = (1/(2 beta)) * grad_sq / (1/(T-t) - 0.5 ln gamma); t = T gives the limit 0.
double mu_discounted_approx(double grad_sq, double t, const RewardParams& params);

// Materialize the three baseline strategy families.
enum class ProfileKind { Flat, RampUp, LearnThenRest };

Schedule make_profile(ProfileKind kind, double scale, std::size_t steps, double dt,
                      const Schedule* shape_source = nullptr);

}  // namespace lrsched
