#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lrsched/dynamics.hpp"

namespace lrsched {

enum class GradMode { ReverseUnrolled, FiniteDifference };

struct MetaOptConfig {
    std::size_t outer_steps = 100;
    double outer_step_size = 0.0;  // 0 = derive from the first gradient's scale
    std::size_t knot_stride = 1;   // schedule knots per this many Euler steps
    double rel_tol = 1e-8;
    GradMode grad_mode = GradMode::ReverseUnrolled;

    void validate() const;
};

struct MetaIterRow {
    std::size_t iter;
    double objective;
    double step_size;
    double grad_norm;
};

struct MetaOptResult {
    Schedule schedule;      // locally optimal, mu >= 0
    double objective;       // cumulative internal reward of `schedule`
    Trajectory trajectory;  // realized under `schedule`
    std::vector<MetaIterRow> history;
    bool converged = false;
    std::string note;
};

// Projected gradient ascent on the cumulative internal reward over schedule
// space. reverse_unrolled propagates an adjoint through every Euler update
// (one Hessian-vector product per step); finite_difference is the
// per-knot central-difference oracle.
MetaOptResult meta_optimize(const ModelSpec& spec, const Weights& w0,
                            const TaskData& data, const RewardParams& params,
                            const Schedule& init, const MetaOptConfig& cfg);

// Per-step meta-gradient dR/dmu at `sched` (no optimization); exposed for the
// dual-mode cross-check.
std::vector<double> meta_gradient(const ModelSpec& spec, const Weights& w0,
                                  const TaskData& data, const RewardParams& params,
                                  const Schedule& sched, GradMode mode);

// Cumulative internal reward realized by a fixed schedule.
double schedule_objective(const ModelSpec& spec, const Weights& w0,
                          const TaskData& data, const RewardParams& params,
                          const Schedule& sched);

struct CalibrationResult {
    double p_final = 0.0;
    double best_reward = 0.0;
    bool unimodal_warning = false;
    std::vector<std::pair<double, double>> samples;  // (candidate, reward)
};

// Golden-section search over the closed-loop controller's final-performance
// estimate, maximizing realized cumulative reward.
CalibrationResult calibrate_final_performance_full(
    const ModelSpec& spec, const Weights& w0, const TaskData& data,
    const RewardParams& params, std::pair<double, double> search_interval,
    double alpha = 0.0);

double calibrate_final_performance(const ModelSpec& spec, const Weights& w0,
                                   const TaskData& data, const RewardParams& params,
                                   std::pair<double, double> search_interval,
                                   double alpha = 0.0);

}  // namespace lrsched
