// Acceptance suite: one self-contained check per criterion, each printing a
// single PASS/FAIL line. Run all with no arguments or one with --criterion N.

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lrsched/config.hpp"
#include "lrsched/controllers.hpp"
#include "lrsched/dynamics.hpp"
#include "lrsched/errors.hpp"
#include "lrsched/harness.hpp"
#include "lrsched/kernels.hpp"
#include "lrsched/meta_opt.hpp"
#include "lrsched/rng.hpp"
#include "lrsched/tasks.hpp"

using namespace lrsched;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

Schedule const_sched(double mu, std::size_t steps, double dt) {
    Schedule s;
    s.dt = dt;
    s.values.assign(steps, mu);
    return s;
}

double closed_loop_reward(const BuiltTask& task, const RewardParams& params,
                          double p_hat, Schedule* sched_out = nullptr) {
    ClosedLoopConfig cc;
    cc.beta = params.beta;
    cc.p_final_estimate = p_hat;
    auto ep = run_closed_loop_episode(
        task.spec, task.w0, task.data,
        [&cc](double p, double) { return mu_closed_loop(p, cc); }, params);
    const double r = cumulative_reward(ep.trajectory, ep.realized, params);
    if (sched_out) *sched_out = std::move(ep.realized);
    return r;
}

// ---------------------------------------------------------------------------
// 1. Closed-loop optimality on the fig2a teacher-student preset.
Outcome criterion1() {
    const ExperimentConfig cfg = preset_config("fig2a");
    BuiltTask task = build_task(cfg.task, cfg.reward, cfg.seed);
    const RewardParams& params = cfg.reward;
    const std::size_t steps = params.step_count();

    const Schedule flat = const_sched(0.413, steps, params.dt);
    auto flat_ep = simulate_episode(task.spec, task.w0, task.data, flat);
    const double r_flat = cumulative_reward(flat_ep.trajectory, flat, params);

    // Numerically optimized reference, warm-started from a self-consistent
    // closed-loop bootstrap and polished by gradient ascent.
    MetaOptConfig mcfg = cfg.meta;
    mcfg.outer_steps = 30;
    Schedule init = closed_loop_warm_start(task, params);
    MetaOptResult meta =
        meta_optimize(task.spec, task.w0, task.data, params, init, mcfg);
    const double r_meta = meta.objective;

    // Closed-loop controller fed the optimized episode's final performance.
    const double p_hat = meta.trajectory.final_performance();
    const double r_cl = closed_loop_reward(task, params, p_hat);

    const double rel_gap = std::fabs(r_cl - r_meta) / std::fabs(r_meta);
    std::ostringstream d;
    d << "R_closed=" << r_cl << " R_meta=" << r_meta << " R_flat(0.413)=" << r_flat
      << " gap=" << 100.0 * rel_gap << "% meta_iters=" << meta.history.size();
    return {rel_gap <= 0.02 && r_cl > r_flat && r_meta > r_flat, d.str()};
}

// ---------------------------------------------------------------------------
// 2. Open-loop exactness on the fig4a linear-regression preset.
Outcome criterion2() {
    const ExperimentConfig cfg = preset_config("fig4a");
    BuiltTask task = build_task(cfg.task, cfg.reward, cfg.seed);
    const RewardParams& params = cfg.reward;
    const std::size_t steps = params.step_count();

    const PerceptronTask pt = complete_task(*task.perceptron, params);
    const OpenLoopSolution sol = solve_theta(pt);
    Schedule analytic;
    analytic.dt = params.dt;
    for (std::size_t k = 0; k < steps; ++k)
        analytic.values.push_back(mu_open_loop(static_cast<double>(k) * params.dt, sol));
    const double mu0 = analytic.values.front();

    MetaOptConfig mcfg = cfg.meta;
    Schedule init = const_sched(0.01 * mu0, steps, params.dt);
    MetaOptResult meta =
        meta_optimize(task.spec, task.w0, task.data, params, init, mcfg);

    double max_dev = 0.0;
    for (std::size_t k = 0; k < steps; ++k)
        max_dev = std::max(max_dev,
                           std::fabs(meta.schedule.values[k] - analytic.values[k]));
    std::ostringstream d;
    d << "max|mu_meta-mu_analytic|=" << max_dev << " vs 5% of mu(0)=" << 0.05 * mu0
      << " (mu0=" << mu0 << ", iters=" << meta.history.size() << ")";
    return {max_dev <= 0.05 * mu0, d.str()};
}

// ---------------------------------------------------------------------------
// 3. First-integral identity along the open-loop perceptron trajectory.
Outcome criterion3() {
    const double dt = 0.001;
    RewardParams params{0.5, 1.0, 1.0, dt};
    auto bundle = make_linear_regression(1, 1.0, 1.0, 64, 1);
    const PerceptronTask pt = complete_task(bundle.task, params);
    const OpenLoopSolution sol = solve_theta(pt);
    const std::size_t steps = params.step_count();

    Schedule sched;
    sched.dt = dt;
    for (std::size_t k = 0; k < steps; ++k)
        sched.values.push_back(mu_open_loop(static_cast<double>(k) * dt, sol));
    auto ep = simulate_episode(bundle.spec, bundle.w0, bundle.data, sched);

    Workspace ws;
    const double l0 = loss_only(bundle.spec, bundle.w0, bundle.data, {}, ws);
    const double l_final = l0 - ep.trajectory.final_performance();
    const double mu_T = 0.0;  // tan(0)
    double max_viol = 0.0;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = std::min(static_cast<double>(k) * dt, params.horizon_T);
        const double mu = mu_open_loop(t, sol);
        const double lt = l0 - ep.trajectory.performance[k];
        const double lhs = params.beta * (mu * mu - mu_T * mu_T);
        max_viol = std::max(max_viol, std::fabs(lhs - (lt - l_final)));
    }
    const double mu0 = sched.values.front();
    const double bound = 10.0 * dt * params.beta * mu0 * mu0;
    std::ostringstream d;
    d << "max violation=" << max_viol << " bound=" << bound;
    return {max_viol <= bound, d.str()};
}

// ---------------------------------------------------------------------------
// 4. Monotonicity sweeps over the fig4b/fig4c/fig4d grids.
Outcome criterion4() {
    auto mu0_of = [](double beta, double dist) {
        PerceptronTask t{1.0, dist, beta, 10.0};
        return mu_open_loop(0.0, solve_theta(t));
    };
    bool beta_ok = true, d_ok = true, gamma_ok = true;
    double prev = 1e300;
    for (int i = 0; i < 10; ++i) {
        const double v = mu0_of(0.2 + (3.0 - 0.2) * i / 9.0, 1.0);
        if (!(v < prev)) beta_ok = false;
        prev = v;
    }
    prev = -1.0;
    for (int i = 0; i < 10; ++i) {
        const double v = mu0_of(0.1, 0.1 + (1.0 - 0.1) * i / 9.0);
        if (!(v > prev)) d_ok = false;
        prev = v;
    }
    prev = -1.0;
    for (double g : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95}) {
        RewardParams p{5.0, g, 0.5, 0.001};
        const double v = mu_discounted_approx(1.0, 0.2, p);
        if (!(v > prev)) gamma_ok = false;
        prev = v;
    }
    std::ostringstream d;
    d << "mu(0) strictly decreasing in beta: " << (beta_ok ? "yes" : "NO")
      << "; strictly increasing in d: " << (d_ok ? "yes" : "NO")
      << "; discounted rule strictly increasing in gamma: "
      << (gamma_ok ? "yes" : "NO");
    return {beta_ok && d_ok && gamma_ok, d.str()};
}

// ---------------------------------------------------------------------------
// 5. Discounted leading-order approximation vs the meta-optimizer (fig4d preset).
Outcome criterion5() {
    ExperimentConfig cfg = preset_config("fig4d");
    BuiltTask task = build_task(cfg.task, cfg.reward, cfg.seed);
    std::ostringstream d;
    bool ok = true;
    for (double gamma : {0.5, 0.9}) {
        RewardParams params = cfg.reward;
        params.gamma = gamma;
        auto [traj9, sched9] = run_discounted_episode(task, params);

        MetaOptConfig mcfg = cfg.meta;
        Schedule init = const_sched(0.001, params.step_count(), params.dt);
        MetaOptResult meta =
            meta_optimize(task.spec, task.w0, task.data, params, init, mcfg);

        const double peak = *std::max_element(meta.schedule.values.begin(),
                                              meta.schedule.values.end());
        double max_dev = 0.0;
        for (std::size_t k = 0; k < sched9.size(); ++k)
            max_dev = std::max(
                max_dev, std::fabs(sched9.values[k] - meta.schedule.values[k]));
        const bool this_ok = max_dev <= 0.10 * peak;
        ok = ok && this_ok;
        d << "gamma=" << gamma << ": max dev=" << max_dev << " vs 10% peak="
          << 0.10 * peak << (this_ok ? " ok; " : " FAIL; ");
    }
    return {ok, d.str()};
}

// ---------------------------------------------------------------------------
// 6. Strategy ordering and misestimation robustness on the fig2efgh preset.
Outcome criterion6() {
    const ExperimentConfig cfg = preset_config("fig2efgh");
    BuiltTask task = build_task(cfg.task, cfg.reward, cfg.seed);
    const RewardParams& params = cfg.reward;
    const std::size_t steps = params.step_count();

    MetaOptConfig mcfg = cfg.meta;
    Schedule init = const_sched(0.01, steps, params.dt);
    MetaOptResult meta =
        meta_optimize(task.spec, task.w0, task.data, params, init, mcfg);
    const double peak_opt = *std::max_element(meta.schedule.values.begin(),
                                              meta.schedule.values.end());
    const double p_true = meta.trajectory.final_performance();

    auto family_best = [&](ProfileKind kind) {
        double best = -1e300;
        for (int i = 0; i < 12; ++i) {
            const double peak = peak_opt * 0.2 * std::pow(2.5 / 0.2, i / 11.0);
            Schedule s = make_profile(kind, peak, steps, params.dt,
                                      kind == ProfileKind::LearnThenRest
                                          ? &meta.schedule
                                          : nullptr);
            try {
                auto ep = simulate_episode(task.spec, task.w0, task.data, s);
                best = std::max(best, cumulative_reward(ep.trajectory, s, params));
            } catch (const DivergedError&) {
            }
        }
        return best;
    };
    const double best_opt_shape = family_best(ProfileKind::LearnThenRest);
    const double best_flat = family_best(ProfileKind::Flat);
    const double best_ramp = family_best(ProfileKind::RampUp);

    const double r_under = closed_loop_reward(task, params, 0.8 * p_true);
    const double r_over = closed_loop_reward(task, params, 1.2 * p_true);

    const bool order_ok = best_opt_shape > best_flat && best_flat > best_ramp;
    const bool mis_ok = r_under > best_flat && r_over > best_flat;
    std::ostringstream d;
    d << "best optimal-shape=" << best_opt_shape << " > best flat=" << best_flat
      << " > best ramp=" << best_ramp << (order_ok ? " ok" : " FAIL")
      << "; misestimation R(0.8)=" << r_under << " R(1.2)=" << r_over
      << (mis_ok ? " both beat flat" : " FAIL");
    return {order_ok && mis_ok, d.str()};
}

// ---------------------------------------------------------------------------
// 7. Estimator convergence at desk scale on the fig3 preset.
Outcome criterion7() {
    ExperimentConfig cfg = preset_config("fig3");
    cfg.metalearn.episodes = 200;
    cfg.metalearn.eval_episodes = 200;
    cfg.metalearn.eval_memory_sizes = {5, 100};
    const MetaLearnSummary s = run_metalearn(cfg, nullptr);
    if (s.eval_memory_sizes.size() != 2)
        return {false, "frozen-memory evaluation did not cover sizes 5 and 100"};
    const double iqr5 = s.eval_iqr[0];
    const double iqr100 = s.eval_iqr[1];
    std::ostringstream d;
    d << "error IQR at 0.5T: memory5=" << iqr5 << " memory100=" << iqr100
      << " (estimator invariants enforced on every call)";
    return {iqr100 < iqr5, d.str()};
}

// ---------------------------------------------------------------------------
// 8. Gradient correctness: analytic vs central differences; reverse-unrolled
//    meta-gradient vs finite differences.
Outcome criterion8() {
    Rng rng(808);
    Workspace ws;
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const int in = 1 + static_cast<int>(rng.index(4));
        const int hid = 1 + static_cast<int>(rng.index(6));
        const int out = 1 + static_cast<int>(rng.index(4));
        ModelSpec spec;
        spec.layer_sizes = {in, hid, out};
        const double r = rng.uniform();
        spec.hidden_activation = r < 0.4   ? Activation::Tanh
                                 : r < 0.8 ? Activation::Softplus
                                           : Activation::Identity;
        spec.bias_flags = {static_cast<std::uint8_t>(rng.index(2)),
                           static_cast<std::uint8_t>(rng.index(2))};
        if (out >= 2 && rng.uniform() < 0.35) {
            spec.output_transform = OutputTransform::Softmax;
            spec.loss = Loss::CrossEntropy;
        }
        Weights w;
        w.flat.resize(spec.param_count());
        for (double& v : w.flat) v = 0.7 * rng.normal();
        TaskData data;
        data.n_samples = 2 + rng.index(6);
        data.input_dim = static_cast<std::size_t>(in);
        data.output_dim = static_cast<std::size_t>(out);
        data.inputs.resize(data.n_samples * data.input_dim);
        for (double& v : data.inputs) v = rng.normal();
        data.targets.assign(data.n_samples * data.output_dim, 0.0);
        if (spec.loss == Loss::CrossEntropy) {
            for (std::size_t sample = 0; sample < data.n_samples; ++sample)
                data.targets[sample * data.output_dim + rng.index(data.output_dim)] =
                    1.0;
        } else {
            for (double& v : data.targets) v = rng.normal();
        }

        std::vector<double> grad(spec.param_count());
        loss_and_gradient(spec, w, data, {}, grad, ws);
        double diff2 = 0.0, norm2 = 0.0;
        Weights wp = w;
        for (std::size_t i = 0; i < grad.size(); ++i) {
            const double keep = wp.flat[i];
            wp.flat[i] = keep + 1e-5;
            const double lp = loss_only(spec, wp, data, {}, ws);
            wp.flat[i] = keep - 1e-5;
            const double lm = loss_only(spec, wp, data, {}, ws);
            wp.flat[i] = keep;
            const double fd = (lp - lm) / 2e-5;
            diff2 += (grad[i] - fd) * (grad[i] - fd);
            norm2 += std::max(grad[i] * grad[i], fd * fd);
        }
        worst = std::max(worst, std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-12));
    }
    const bool grad_ok = worst <= 1e-5;

    // 10-step toy meta-gradient cross-check
    TeacherStudentOpts o;
    o.input_dim = 2;
    o.teacher_hidden = 3;
    o.student_hidden = 3;
    o.output_dim = 2;
    o.n_samples = 16;
    o.seed = 88;
    o.student_init_std = 0.4;
    auto b = make_teacher_student(o);
    RewardParams params{0.3, 0.9, 1.0, 0.1};
    Schedule sched = const_sched(0.35, 10, 0.1);
    const auto rev =
        meta_gradient(b.spec, b.w0, b.data, params, sched, GradMode::ReverseUnrolled);
    const auto fd =
        meta_gradient(b.spec, b.w0, b.data, params, sched, GradMode::FiniteDifference);
    double diff2 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < rev.size(); ++i) {
        diff2 += (rev[i] - fd[i]) * (rev[i] - fd[i]);
        norm2 += std::max(rev[i] * rev[i], fd[i] * fd[i]);
    }
    const double meta_err = std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-300);
    const bool meta_ok = meta_err <= 1e-4;

    std::ostringstream d;
    d << "worst normwise grad error over 100 cases=" << worst
      << " (<=1e-5); meta-gradient rel err=" << meta_err << " (<=1e-4)";
    return {grad_ok && meta_ok, d.str()};
}

// ---------------------------------------------------------------------------
// 9. Desk-scale MNIST property: calibrated closed loop beats the best flat
//    baseline from a 5-point grid.
Outcome criterion9() {
    ExperimentConfig cfg = preset_config("fig2c");
    BuiltTask task = build_task(cfg.task, cfg.reward, cfg.seed);
    const RewardParams& params = cfg.reward;
    const std::size_t steps = params.step_count();
    if (task.data.n_samples > 5000)
        return {false, "subset exceeds the 5000-image desk-scale cap"};

    double best_flat = -1e300, best_flat_lr = 0.0;
    for (double lr : {0.05, 0.1, 0.172, 0.3, 0.6}) {
        const Schedule s = const_sched(lr, steps, params.dt);
        auto ep = simulate_episode(task.spec, task.w0, task.data, s);
        const double r = cumulative_reward(ep.trajectory, s, params);
        if (r > best_flat) {
            best_flat = r;
            best_flat_lr = lr;
        }
    }

    Workspace ws;
    const double lref = loss_only(task.spec, task.w0, task.data, {}, ws);
    const double p_cal = calibrate_final_performance(task.spec, task.w0, task.data,
                                                     params, {0.0, lref});
    const double r_cl = closed_loop_reward(task, params, p_cal);

    std::ostringstream d;
    d << "n=" << task.data.n_samples << " calibrated P(T)=" << p_cal
      << " R_closed=" << r_cl << " best flat R=" << best_flat << " (lr "
      << best_flat_lr << ")";
    return {r_cl > best_flat, d.str()};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> fn;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all = {
        {1, "closed-loop optimality (teacher-student)", criterion1},
        {2, "open-loop exactness (linear regression)", criterion2},
        {3, "first-integral identity", criterion3},
        {4, "monotonicity sweeps", criterion4},
        {5, "discounted approximation", criterion5},
        {6, "strategy ordering + misestimation", criterion6},
        {7, "estimator convergence", criterion7},
        {8, "gradient correctness", criterion8},
        {9, "mnist desk-scale property", criterion9},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
            only = std::atoi(argv[++i]);
    }
    std::cout << "kernels: " << kern::backend() << "\n";
    int failures = 0;
    for (const Criterion& c : criteria()) {
        if (only != 0 && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.fn();
        } catch (const Error& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        std::cout << (out.pass ? "[PASS] " : "[FAIL] ") << "criterion " << c.id
                  << " (" << c.name << "): " << out.detail << " [" << secs << " s]"
                  << std::endl;
        if (!out.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
