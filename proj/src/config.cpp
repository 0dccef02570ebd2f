#include "lrsched/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lrsched/errors.hpp"

namespace lrsched {

using nlohmann::json;

namespace {

ExperimentConfig base_defaults() { return ExperimentConfig{}; }

ExperimentConfig fig2a() {
    ExperimentConfig c;
    c.preset = "fig2a";
    c.task.kind = TaskConfig::Kind::TeacherStudent;
    c.task.input_dim = 4;
    c.task.teacher_hidden = 10;
    c.task.student_hidden = 10;
    c.task.output_dim = 6;
    c.task.activation = "tanh";
    c.task.n_samples = 2048;
    c.task.student_init_std = 0.1;
    c.reward = {0.5, 1.0, 80.0, 0.01};
    c.controller.type = ControllerConfig::Type::ClosedLoop;
    c.controller.p_final_mode = "meta";
    c.meta.outer_steps = 60;
    c.meta.knot_stride = 20;
    c.meta.rel_tol = 1e-7;
    c.meta_warm_start = true;  // holds the runtime budget at 8000x2048 scale
    return c;
}

ExperimentConfig fig2a_baseline() {
    ExperimentConfig c = fig2a();
    c.preset = "fig2a_baseline";
    c.controller = {};
    c.controller.type = ControllerConfig::Type::Profile;
    c.controller.profile = "flat";
    c.controller.scale = 0.413;
    return c;
}

ExperimentConfig fig2c() {
    ExperimentConfig c;
    c.preset = "fig2c";
    c.task.kind = TaskConfig::Kind::Mnist;
    c.task.student_hidden = 100;
    c.task.student_init_std = 0.01;
    c.task.batch_mode = "balanced";
    c.task.batch_size = 100;
    c.task.max_per_class = 500;  // desk-scale subset, <= 5000 images
    c.reward = {0.8, 1.0, 3.0, 0.001};
    c.controller.type = ControllerConfig::Type::ClosedLoop;
    c.controller.p_final_mode = "calibrate";
    return c;
}

ExperimentConfig fig2c_baseline() {
    ExperimentConfig c = fig2c();
    c.preset = "fig2c_baseline";
    c.controller = {};
    c.controller.type = ControllerConfig::Type::Profile;
    c.controller.profile = "flat";
    c.controller.scale = 0.172;
    return c;
}

ExperimentConfig fig2efgh() {
    ExperimentConfig c;
    c.preset = "fig2efgh";
    c.task.kind = TaskConfig::Kind::TwoGaussian;
    c.task.d = 2.0;
    c.task.sigma2 = 4.0;
    c.task.n_samples = 1000;
    c.reward = {0.5, 1.0, 0.7, 0.001};
    c.controller.type = ControllerConfig::Type::MetaOpt;
    c.meta.outer_steps = 300;
    c.meta.knot_stride = 1;
    c.meta.rel_tol = 1e-9;
    return c;
}

ExperimentConfig fig3() {
    ExperimentConfig c;
    c.preset = "fig3";
    c.task.kind = TaskConfig::Kind::TeacherStudent;
    c.task.input_dim = 3;
    c.task.teacher_hidden = 6;
    c.task.student_hidden = 6;
    c.task.output_dim = 2;
    c.task.activation = "softplus";
    c.task.n_samples = 1024;
    c.task.student_init_std = 0.001;
    c.task.batch_mode = "uniform";
    c.task.batch_size = 32;
    c.reward = {0.01, 1.0, 1.0, 0.001};  // desk scale: 1000 steps per episode
    c.controller.type = ControllerConfig::Type::ClosedLoop;
    c.controller.alpha = 10.0;
    c.estimator = EstimatorConfig{0.7, 0.1, 0.001, 0};
    c.metalearn.episodes = 200;
    return c;
}

ExperimentConfig fig4a() {
    ExperimentConfig c;
    c.preset = "fig4a";
    c.task.kind = TaskConfig::Kind::LinearRegression;
    c.task.dim = 4;
    c.task.d = 1.0;
    c.task.sigma2 = 1.0;
    c.task.n_samples = 256;
    c.reward = {0.1, 1.0, 10.0, 0.01};
    c.controller.type = ControllerConfig::Type::OpenLoop;
    c.meta.outer_steps = 600;
    c.meta.knot_stride = 1;
    c.meta.rel_tol = 1e-10;
    return c;
}

ExperimentConfig fig4b() {
    ExperimentConfig c = fig4a();
    c.preset = "fig4b";
    c.sweep = SweepConfig{"reward.beta",
                          {0.2, 0.511, 0.822, 1.133, 1.444, 1.756, 2.067, 2.378,
                           2.689, 3.0}};
    return c;
}

ExperimentConfig fig4c() {
    ExperimentConfig c = fig4a();
    c.preset = "fig4c";
    c.sweep = SweepConfig{"task.d", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}};
    return c;
}

ExperimentConfig fig4d() {
    ExperimentConfig c;
    c.preset = "fig4d";
    c.task.kind = TaskConfig::Kind::LinearRegression;
    c.task.dim = 1;
    c.task.d = 1.0;
    c.task.sigma2 = 1.0;
    c.task.n_samples = 64;
    c.reward = {5.0, 0.5, 0.5, 0.001};
    c.controller.type = ControllerConfig::Type::MetaOpt;
    c.meta.outer_steps = 500;
    c.meta.rel_tol = 1e-10;
    c.sweep = SweepConfig{"reward.gamma", {0.1, 0.3, 0.5, 0.7, 0.9, 0.95}};
    return c;
}

ExperimentConfig fig4e() {
    ExperimentConfig c = fig4d();
    c.preset = "fig4e";
    c.controller.type = ControllerConfig::Type::DiscountedApprox;
    return c;
}

ExperimentConfig fig4f() {
    ExperimentConfig c;
    c.preset = "fig4f";
    c.task.kind = TaskConfig::Kind::TeacherStudent;
    c.task.input_dim = 4;
    c.task.teacher_hidden = 10;
    c.task.student_hidden = 4;
    c.task.output_dim = 6;
    c.task.activation = "tanh";
    c.task.n_samples = 2048;
    c.task.student_init_std = 0.001;
    c.reward = {0.1, 1.0, 80.0, 0.01};
    c.controller.type = ControllerConfig::Type::MetaOpt;
    c.meta.outer_steps = 60;
    c.meta.knot_stride = 20;
    c.sweep = SweepConfig{"reward.gamma", {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}};
    return c;
}

ExperimentConfig fig5() {
    ExperimentConfig c;
    c.preset = "fig5";
    c.task.kind = TaskConfig::Kind::LinearRegression;
    c.task.dim = 1;
    c.task.d = 1.0;
    c.task.sigma2 = 1.0;
    c.task.n_samples = 64;
    c.reward = {0.05, 1.0, 0.13, 0.001};
    c.controller.type = ControllerConfig::Type::ClosedLoop;
    c.controller.p_final_mode = "open_loop";
    return c;
}

ExperimentConfig fig5_scaled() {
    ExperimentConfig c = fig5();
    c.preset = "fig5_scaled";
    c.controller = {};
    c.controller.type = ControllerConfig::Type::Profile;
    c.controller.profile = "learn_then_rest";
    c.controller.shape_from = "open_loop";
    c.controller.scale = 0.6;
    c.controller.scale_rel = true;
    return c;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig2a", "fig2a_baseline", "fig2c", "fig2c_baseline", "fig2efgh",
            "fig3",  "fig4a",          "fig4b", "fig4c",          "fig4d",
            "fig4e", "fig4f",          "fig5",  "fig5_scaled"};
}

ExperimentConfig preset_config(const std::string& name) {
    if (name == "fig2a") return fig2a();
    if (name == "fig2a_baseline") return fig2a_baseline();
    if (name == "fig2c") return fig2c();
    if (name == "fig2c_baseline") return fig2c_baseline();
    if (name == "fig2efgh") return fig2efgh();
    if (name == "fig3") return fig3();
    if (name == "fig4a") return fig4a();
    if (name == "fig4b") return fig4b();
    if (name == "fig4c") return fig4c();
    if (name == "fig4d") return fig4d();
    if (name == "fig4e") return fig4e();
    if (name == "fig4f") return fig4f();
    if (name == "fig5") return fig5();
    if (name == "fig5_scaled") return fig5_scaled();
    throw ConfigError("unknown preset '" + name + "'");
}

namespace {

template <typename T>
void read_field(const json& j, const char* section, const char* name, T& out) {
    auto it = j.find(name);
    if (it == j.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field ") + section + "." + name + ": " +
                          e.what());
    }
}

TaskConfig::Kind task_kind_from(const std::string& s) {
    if (s == "teacher_student") return TaskConfig::Kind::TeacherStudent;
    if (s == "two_gaussian") return TaskConfig::Kind::TwoGaussian;
    if (s == "linear_regression") return TaskConfig::Kind::LinearRegression;
    if (s == "mnist") return TaskConfig::Kind::Mnist;
    throw ConfigError("config field task.kind: unknown kind '" + s + "'");
}

ControllerConfig::Type controller_type_from(const std::string& s) {
    if (s == "closed_loop") return ControllerConfig::Type::ClosedLoop;
    if (s == "open_loop") return ControllerConfig::Type::OpenLoop;
    if (s == "discounted_approx") return ControllerConfig::Type::DiscountedApprox;
    if (s == "profile") return ControllerConfig::Type::Profile;
    if (s == "meta_opt") return ControllerConfig::Type::MetaOpt;
    throw ConfigError("config field controller.type: unknown type '" + s + "'");
}

void apply_json(ExperimentConfig& c, const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    read_field(j, "", "seed", c.seed);
    read_field(j, "", "output_dir", c.output_dir);
    read_field(j, "", "workers", c.workers);
    if (auto it = j.find("task"); it != j.end()) {
        const json& t = *it;
        std::string kind;
        read_field(t, "task", "kind", kind);
        if (!kind.empty()) c.task.kind = task_kind_from(kind);
        read_field(t, "task", "input_dim", c.task.input_dim);
        read_field(t, "task", "teacher_hidden", c.task.teacher_hidden);
        read_field(t, "task", "student_hidden", c.task.student_hidden);
        read_field(t, "task", "output_dim", c.task.output_dim);
        read_field(t, "task", "activation", c.task.activation);
        read_field(t, "task", "n_samples", c.task.n_samples);
        read_field(t, "task", "student_init_std", c.task.student_init_std);
        read_field(t, "task", "d", c.task.d);
        read_field(t, "task", "sigma2", c.task.sigma2);
        read_field(t, "task", "dim", c.task.dim);
        read_field(t, "task", "batch_mode", c.task.batch_mode);
        read_field(t, "task", "batch_size", c.task.batch_size);
        read_field(t, "task", "images_path", c.task.images_path);
        read_field(t, "task", "labels_path", c.task.labels_path);
        read_field(t, "task", "max_per_class", c.task.max_per_class);
        read_field(t, "task", "max_total", c.task.max_total);
    }
    if (auto it = j.find("reward"); it != j.end()) {
        const json& r = *it;
        read_field(r, "reward", "beta", c.reward.beta);
        read_field(r, "reward", "gamma", c.reward.gamma);
        read_field(r, "reward", "horizon_T", c.reward.horizon_T);
        read_field(r, "reward", "dt", c.reward.dt);
    }
    if (auto it = j.find("controller"); it != j.end()) {
        const json& k = *it;
        std::string type;
        read_field(k, "controller", "type", type);
        if (!type.empty()) c.controller.type = controller_type_from(type);
        read_field(k, "controller", "p_final_mode", c.controller.p_final_mode);
        read_field(k, "controller", "p_final", c.controller.p_final);
        read_field(k, "controller", "pt_ratio", c.controller.pt_ratio);
        read_field(k, "controller", "alpha", c.controller.alpha);
        read_field(k, "controller", "profile", c.controller.profile);
        read_field(k, "controller", "scale", c.controller.scale);
        read_field(k, "controller", "scale_rel", c.controller.scale_rel);
        read_field(k, "controller", "shape_from", c.controller.shape_from);
        read_field(k, "controller", "calib_lo", c.controller.calib_lo);
        read_field(k, "controller", "calib_hi", c.controller.calib_hi);
    }
    if (auto it = j.find("estimator"); it != j.end()) {
        EstimatorConfig e = c.estimator.value_or(EstimatorConfig{});
        const json& s = *it;
        read_field(s, "estimator", "rho", e.rho);
        read_field(s, "estimator", "sigma_k", e.sigma_k);
        read_field(s, "estimator", "capacity", e.capacity);
        e.dt = c.reward.dt;
        c.estimator = e;
    }
    if (auto it = j.find("meta"); it != j.end()) {
        const json& m = *it;
        read_field(m, "meta", "warm_start", c.meta_warm_start);
        read_field(m, "meta", "outer_steps", c.meta.outer_steps);
        read_field(m, "meta", "step_size", c.meta.outer_step_size);
        read_field(m, "meta", "knot_stride", c.meta.knot_stride);
        read_field(m, "meta", "rel_tol", c.meta.rel_tol);
        std::string mode;
        read_field(m, "meta", "grad_mode", mode);
        if (mode == "finite_difference") c.meta.grad_mode = GradMode::FiniteDifference;
        else if (mode == "reverse_unrolled" || mode.empty())
            c.meta.grad_mode = GradMode::ReverseUnrolled;
        else
            throw ConfigError("config field meta.grad_mode: unknown mode '" + mode + "'");
    }
    if (auto it = j.find("sweep"); it != j.end()) {
        SweepConfig s;
        read_field(*it, "sweep", "name", s.name);
        read_field(*it, "sweep", "values", s.values);
        if (s.name.empty() || s.values.empty())
            throw ConfigError("config field sweep: needs 'name' and non-empty 'values'");
        c.sweep = s;
    }
    if (auto it = j.find("metalearn"); it != j.end()) {
        const json& m = *it;
        read_field(m, "metalearn", "episodes", c.metalearn.episodes);
        read_field(m, "metalearn", "eval_episodes", c.metalearn.eval_episodes);
        read_field(m, "metalearn", "eval_memory_sizes", c.metalearn.eval_memory_sizes);
        read_field(m, "metalearn", "percentile_buckets", c.metalearn.percentile_buckets);
    }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig c = base_defaults();
    if (j.contains("preset")) {
        std::string name;
        read_field(j, "", "preset", name);
        c = preset_config(name);
    }
    apply_json(c, j);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

void apply_scalar_override(ExperimentConfig& cfg, const std::string& name,
                           double value) {
    if (name == "reward.beta") {
        cfg.reward.beta = value;
    } else if (name == "reward.gamma") {
        cfg.reward.gamma = value;
    } else if (name == "reward.horizon_T") {
        cfg.reward.horizon_T = value;
    } else if (name == "reward.dt") {
        cfg.reward.dt = value;
    } else if (name == "task.d") {
        cfg.task.d = value;
    } else if (name == "task.sigma2") {
        cfg.task.sigma2 = value;
    } else if (name == "task.seed" || name == "seed") {
        cfg.seed = static_cast<std::uint64_t>(value);
    } else if (name == "controller.pt_ratio") {
        cfg.controller.pt_ratio = value;
    } else if (name == "controller.scale") {
        cfg.controller.scale = value;
    } else if (name == "controller.p_final") {
        cfg.controller.p_final = value;
        cfg.controller.p_final_mode = "explicit";
    } else if (name == "controller.alpha") {
        cfg.controller.alpha = value;
    } else {
        throw ConfigError("sweep name '" + name + "' does not reference a sweepable scalar field");
    }
}

}  // namespace lrsched
