#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

#include "lrsched/config.hpp"
#include "lrsched/controllers.hpp"
#include "lrsched/tasks.hpp"

namespace lrsched {

struct BuiltTask {
    ModelSpec spec;
    Weights w0;
    TaskData data;
    std::optional<PerceptronTask> perceptron;  // linear-regression tasks only
};

BuiltTask build_task(const TaskConfig& tc, const RewardParams& reward,
                     std::uint64_t seed);

// One experiment, computed in memory.
struct RunArtifacts {
    Schedule schedule;
    Trajectory trajectory;
    double total_reward = 0.0;
    double total_effort = 0.0;
    double final_p = 0.0;
    double mu0 = 0.0;
    double resolved_p_final = 0.0;  // closed-loop estimate after pt_ratio
    std::optional<MetaOptResult> meta;
    std::optional<CalibrationResult> calibration;
};

// Pre-resolved expensive artifacts shared across sweep points.
struct SharedResolution {
    std::optional<double> p_final;      // true P(T) before pt_ratio
    std::optional<Schedule> shape;      // learn_then_rest source
};

RunArtifacts run_experiment(const ExperimentConfig& cfg,
                            const SharedResolution* shared = nullptr);

// Discounted leading-order rule driven online by the squared performance
// gradient (single-weight models only).
std::pair<Trajectory, Schedule> run_discounted_episode(const BuiltTask& task,
                                                       const RewardParams& params);

// Self-consistent closed-loop bootstrap: a flat probe episode fixes an initial
// P(T) guess, then a few closed-loop passes update it to the realized value.
// Returns the last realized schedule; p_final_out gets the matching P(T).
Schedule closed_loop_warm_start(const BuiltTask& task, const RewardParams& params,
                                int iterations = 3, double* p_final_out = nullptr);

void write_run_artifacts(const std::filesystem::path& dir, const RunArtifacts& art,
                         const RewardParams& params);

// Meta-learning loop over sequential episodes (the fig3 preset protocol).
struct MetaLearnSummary {
    std::size_t episodes = 0;
    std::size_t steps_per_episode = 0;
    // error IQR at t = 0.5 T per evaluated memory size (parallel arrays)
    std::vector<std::size_t> eval_memory_sizes;
    std::vector<double> eval_iqr;
};

MetaLearnSummary run_metalearn(const ExperimentConfig& cfg,
                               const std::filesystem::path* out_dir);

// CLI entry points; return process exit codes (0 ok, 2 config, 3 numerical).
int cmd_run(const ExperimentConfig& cfg, std::ostream& log);
int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log);
int cmd_metalearn(const ExperimentConfig& cfg, std::ostream& log);
int cmd_calibrate(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace lrsched
