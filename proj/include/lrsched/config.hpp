#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lrsched/estimator.hpp"
#include "lrsched/meta_opt.hpp"
#include "lrsched/model.hpp"
#include "lrsched/reward.hpp"

namespace lrsched {

struct TaskConfig {
    enum class Kind { TeacherStudent, TwoGaussian, LinearRegression, Mnist };
    Kind kind = Kind::TeacherStudent;

    // teacher-student
    int input_dim = 4;
    int teacher_hidden = 10;
    int student_hidden = 10;
    int output_dim = 6;
    std::string activation = "tanh";  // identity | tanh | softplus
    std::size_t n_samples = 2048;
    double student_init_std = 0.1;

    // two-gaussian (d, sigma2) / linear regression (dim, d, sigma2)
    double d = 1.0;
    double sigma2 = 1.0;
    std::size_t dim = 1;

    // batching
    std::string batch_mode = "full";  // full | uniform | balanced
    std::size_t batch_size = 0;

    // mnist
    std::string images_path;
    std::string labels_path;
    std::size_t max_per_class = 0;
    std::size_t max_total = 0;
};

struct ControllerConfig {
    enum class Type { ClosedLoop, OpenLoop, DiscountedApprox, Profile, MetaOpt };
    Type type = Type::ClosedLoop;

    // closed loop
    std::string p_final_mode = "meta";  // explicit | meta | calibrate | open_loop
    double p_final = 0.0;               // used by mode "explicit"
    double pt_ratio = 1.0;              // misestimation multiplier on the resolved P(T)
    double alpha = 0.0;                 // cost-free base rate

    // profile
    std::string profile = "flat";  // flat | ramp_up | learn_then_rest
    double scale = 0.0;
    bool scale_rel = false;             // scale relative to the shape source's peak
    std::string shape_from = "meta";    // meta | open_loop

    // calibration interval; lo == hi == 0 selects [0, L(w0)]
    double calib_lo = 0.0;
    double calib_hi = 0.0;
};

struct SweepConfig {
    std::string name;  // e.g. reward.beta, task.d, controller.pt_ratio
    std::vector<double> values;
};

struct MetaLearnConfig {
    std::size_t episodes = 200;
    std::size_t eval_episodes = 0;
    std::vector<std::size_t> eval_memory_sizes = {5, 100};
    std::vector<std::size_t> percentile_buckets = {5, 25, 100, 1000000};
};

struct ExperimentConfig {
    std::string preset;  // name this config was derived from, if any
    TaskConfig task;
    RewardParams reward;
    ControllerConfig controller;
    std::optional<EstimatorConfig> estimator;
    MetaOptConfig meta;
    bool meta_warm_start = false;  // seed the optimizer from a closed-loop bootstrap
    std::optional<SweepConfig> sweep;
    MetaLearnConfig metalearn;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    std::size_t workers = 1;
};

// Built-in experiment presets carrying the published constants
// (fig2a, fig2a_baseline, fig2c, fig2c_baseline, fig2efgh, fig3, fig4a..fig4f,
// fig5, fig5_scaled).
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

// JSON config text; an optional "preset" key seeds the config, remaining keys
// override it.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Scalar field override used by parameter sweeps; throws ConfigError for
// unknown names.
void apply_scalar_override(ExperimentConfig& cfg, const std::string& name,
                           double value);

}  // namespace lrsched
