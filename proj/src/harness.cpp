#include "lrsched/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <thread>

#include "lrsched/errors.hpp"
#include "lrsched/kernels.hpp"
#include "lrsched/rng.hpp"

namespace lrsched {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kStudentSalt = 0x57d0;
constexpr std::uint64_t kBatchSalt = 0xba7c;
constexpr std::uint64_t kEvalSalt = 0xe7a1;

Activation activation_from(const std::string& s) {
    if (s == "identity") return Activation::Identity;
    if (s == "tanh") return Activation::Tanh;
    if (s == "softplus") return Activation::Softplus;
    throw ConfigError("task.activation: unknown activation '" + s + "'");
}

void apply_batch_config(TaskData& data, const TaskConfig& tc, std::uint64_t seed) {
    if (tc.batch_mode == "full") {
        data.batch.kind = BatchSpec::Kind::Full;
    } else if (tc.batch_mode == "uniform") {
        data.batch.kind = BatchSpec::Kind::Uniform;
    } else if (tc.batch_mode == "balanced") {
        data.batch.kind = BatchSpec::Kind::ClassBalanced;
    } else {
        throw ConfigError("task.batch_mode: unknown mode '" + tc.batch_mode + "'");
    }
    if (data.batch.kind != BatchSpec::Kind::Full) {
        if (tc.batch_size == 0)
            throw ConfigError("task.batch_size: required for minibatch modes");
        data.batch.size = tc.batch_size;
        data.batch.seed = Rng::mix(seed, kBatchSalt);
    }
}

fs::path resolve_mnist_dir() {
    if (const char* env = std::getenv("LRSCHED_MNIST_DIR")) return fs::path(env);
    // No real data available: fall back to the bundled synthetic digits.
    const fs::path dir = fs::temp_directory_path() / "lrsched_synthetic_digits";
    if (!fs::exists(dir / "train-images-idx3-ubyte"))
        write_synthetic_digits_idx(dir, 400, 0x5d1ULL);
    return dir;
}

}  // namespace

BuiltTask build_task(const TaskConfig& tc, const RewardParams& reward,
                     std::uint64_t seed) {
    (void)reward;
    BuiltTask out;
    switch (tc.kind) {
        case TaskConfig::Kind::TeacherStudent: {
            TeacherStudentOpts o;
            o.input_dim = tc.input_dim;
            o.teacher_hidden = tc.teacher_hidden;
            o.student_hidden = tc.student_hidden;
            o.output_dim = tc.output_dim;
            o.activation = activation_from(tc.activation);
            o.n_samples = tc.n_samples;
            o.seed = seed;
            o.student_init_std = tc.student_init_std;
            TaskBundle b = make_teacher_student(o);
            out.spec = std::move(b.spec);
            out.w0 = std::move(b.w0);
            out.data = std::move(b.data);
            break;
        }
        case TaskConfig::Kind::TwoGaussian: {
            TaskBundle b = make_two_gaussian(tc.d, tc.sigma2, tc.n_samples, seed);
            out.spec = std::move(b.spec);
            out.w0 = std::move(b.w0);
            out.data = std::move(b.data);
            break;
        }
        case TaskConfig::Kind::LinearRegression: {
            LinRegBundle b =
                make_linear_regression(tc.dim, tc.d, tc.sigma2, tc.n_samples, seed);
            out.spec = std::move(b.spec);
            out.w0 = std::move(b.w0);
            out.data = std::move(b.data);
            out.perceptron = b.task;
            break;
        }
        case TaskConfig::Kind::Mnist: {
            fs::path images = tc.images_path;
            fs::path labels = tc.labels_path;
            if (images.empty() || labels.empty()) {
                const fs::path dir = resolve_mnist_dir();
                images = dir / "train-images-idx3-ubyte";
                labels = dir / "train-labels-idx1-ubyte";
            }
            MnistSubset sub;
            sub.max_per_class = tc.max_per_class;
            sub.max_total = tc.max_total;
            out.data = load_mnist(images, labels, sub);
            out.spec.layer_sizes = {static_cast<int>(out.data.input_dim),
                                    tc.student_hidden,
                                    static_cast<int>(out.data.output_dim)};
            out.spec.hidden_activation = Activation::Softplus;
            out.spec.output_transform = OutputTransform::Softmax;
            out.spec.loss = Loss::CrossEntropy;
            out.spec.bias_flags = {1, 0};
            Rng rng(Rng::mix(seed, kStudentSalt));
            out.w0.flat.resize(out.spec.param_count());
            for (double& v : out.w0.flat) v = tc.student_init_std * rng.normal();
            break;
        }
    }
    apply_batch_config(out.data, tc, seed);
    return out;
}

namespace {

Schedule analytic_open_loop_schedule(const PerceptronTask& task,
                                     const RewardParams& params) {
    const OpenLoopSolution sol = solve_theta(task);
    const std::size_t steps = params.step_count();
    Schedule s;
    s.dt = params.dt;
    s.values.resize(steps);
    for (std::size_t k = 0; k < steps; ++k)
        s.values[k] = mu_open_loop(static_cast<double>(k) * params.dt, sol);
    return s;
}

Schedule default_meta_init(const BuiltTask& task, const RewardParams& params) {
    double scale = 1.0;
    if (task.perceptron) {
        PerceptronTask pt = complete_task(*task.perceptron, params);
        const OpenLoopSolution sol = solve_theta(pt);
        const double mu0 = mu_open_loop(0.0, sol);
        if (mu0 > 0.0) scale = mu0;
    }
    Schedule s;
    s.dt = params.dt;
    s.values.assign(params.step_count(), 0.01 * scale);
    return s;
}

}  // namespace

std::pair<Trajectory, Schedule> run_discounted_episode(const BuiltTask& task,
                                                       const RewardParams& params) {
    if (task.spec.param_count() != 1)
        throw ConfigError(
            "discounted_approx controller applies to single-weight models only");
    const std::size_t steps = params.step_count();
    Workspace ws;
    std::vector<double> grad(1, 0.0);
    std::vector<std::uint32_t> batch;
    Weights w = task.w0;
    const double lref = loss_only(task.spec, w, task.data, {}, ws);

    Trajectory traj;
    traj.dt = params.dt;
    Schedule sched;
    sched.dt = params.dt;
    for (std::size_t k = 0; k < steps; ++k) {
        sample_batch(task.data, k, batch);
        const double lk = loss_and_gradient(task.spec, w, task.data, batch, grad, ws);
        if (std::fabs(lk) > kDivergenceGuard)
            throw DivergedError("discounted-approximation episode diverged",
                                k == 0 ? 0 : k - 1);
        const double gs = grad[0] * grad[0];
        const double mu =
            mu_discounted_approx(gs, static_cast<double>(k) * params.dt, params);
        traj.performance.push_back(lref - lk);
        sched.values.push_back(mu);
        kern::ops().axpy(-params.dt * mu, grad.data(), w.flat.data(), 1);
    }
    traj.performance.push_back(lref - loss_only(task.spec, w, task.data, {}, ws));
    return {std::move(traj), std::move(sched)};
}

Schedule closed_loop_warm_start(const BuiltTask& task, const RewardParams& params,
                                int iterations, double* p_final_out) {
    Workspace ws;
    const double lref = loss_only(task.spec, task.w0, task.data, {}, ws);
    const double probe_mu =
        std::max(0.01, 0.25 * std::sqrt(std::max(lref, 0.0) / params.beta));
    const std::size_t steps = params.step_count();
    Schedule probe;
    probe.dt = params.dt;
    probe.values.assign(steps, probe_mu);
    double p_final =
        simulate_episode(task.spec, task.w0, task.data, probe).trajectory
            .final_performance();

    Schedule realized = probe;
    for (int it = 0; it < iterations; ++it) {
        ClosedLoopConfig cc;
        cc.beta = params.beta;
        cc.p_final_estimate = p_final;
        auto ep = run_closed_loop_episode(
            task.spec, task.w0, task.data,
            [&cc](double p, double) { return mu_closed_loop(p, cc); }, params);
        realized = std::move(ep.realized);
        p_final = ep.trajectory.final_performance();
    }
    if (p_final_out) *p_final_out = p_final;
    return realized;
}

RunArtifacts run_experiment(const ExperimentConfig& cfg,
                            const SharedResolution* shared) {
    cfg.reward.validate();
    BuiltTask task = build_task(cfg.task, cfg.reward, cfg.seed);
    const std::size_t steps = cfg.reward.step_count();
    RunArtifacts art;

    auto run_meta = [&]() {
        Schedule init = cfg.meta_warm_start
                            ? closed_loop_warm_start(task, cfg.reward)
                            : default_meta_init(task, cfg.reward);
        return meta_optimize(task.spec, task.w0, task.data, cfg.reward, init,
                             cfg.meta);
    };
    auto perceptron_or_throw = [&]() -> PerceptronTask {
        if (!task.perceptron)
            throw ConfigError("controller requires a linear_regression task");
        return complete_task(*task.perceptron, cfg.reward);
    };

    switch (cfg.controller.type) {
        case ControllerConfig::Type::MetaOpt: {
            MetaOptResult res = run_meta();
            art.schedule = res.schedule;
            art.trajectory = res.trajectory;
            art.meta = std::move(res);
            break;
        }
        case ControllerConfig::Type::OpenLoop: {
            const Schedule s = analytic_open_loop_schedule(perceptron_or_throw(), cfg.reward);
            EpisodeResult ep = simulate_episode(task.spec, task.w0, task.data, s);
            art.schedule = s;
            art.trajectory = std::move(ep.trajectory);
            break;
        }
        case ControllerConfig::Type::DiscountedApprox: {
            auto [traj, sched] = run_discounted_episode(task, cfg.reward);
            art.schedule = std::move(sched);
            art.trajectory = std::move(traj);
            break;
        }
        case ControllerConfig::Type::Profile: {
            ProfileKind kind;
            if (cfg.controller.profile == "flat") kind = ProfileKind::Flat;
            else if (cfg.controller.profile == "ramp_up") kind = ProfileKind::RampUp;
            else if (cfg.controller.profile == "learn_then_rest")
                kind = ProfileKind::LearnThenRest;
            else
                throw ConfigError("controller.profile: unknown profile '" +
                                  cfg.controller.profile + "'");
            Schedule source;
            const Schedule* src_ptr = nullptr;
            double scale = cfg.controller.scale;
            if (kind == ProfileKind::LearnThenRest) {
                if (shared && shared->shape) {
                    source = *shared->shape;
                } else if (cfg.controller.shape_from == "open_loop") {
                    source = analytic_open_loop_schedule(perceptron_or_throw(), cfg.reward);
                } else if (cfg.controller.shape_from == "meta") {
                    MetaOptResult res = run_meta();
                    source = res.schedule;
                    art.meta = std::move(res);
                } else {
                    throw ConfigError("controller.shape_from: unknown source '" +
                                      cfg.controller.shape_from + "'");
                }
                src_ptr = &source;
                if (cfg.controller.scale_rel) {
                    const double peak = *std::max_element(source.values.begin(),
                                                          source.values.end());
                    scale *= peak;
                }
            }
            const Schedule s = make_profile(kind, scale, steps, cfg.reward.dt, src_ptr);
            EpisodeResult ep = simulate_episode(task.spec, task.w0, task.data, s);
            art.schedule = s;
            art.trajectory = std::move(ep.trajectory);
            break;
        }
        case ControllerConfig::Type::ClosedLoop: {
            double p_base;
            if (shared && shared->p_final) {
                p_base = *shared->p_final;
            } else if (cfg.controller.p_final_mode == "explicit") {
                p_base = cfg.controller.p_final;
            } else if (cfg.controller.p_final_mode == "meta") {
                MetaOptResult res = run_meta();
                p_base = res.trajectory.final_performance();
                art.meta = std::move(res);
            } else if (cfg.controller.p_final_mode == "open_loop") {
                p_base = solve_theta(perceptron_or_throw()).final_performance();
            } else if (cfg.controller.p_final_mode == "calibrate") {
                double lo = cfg.controller.calib_lo, hi = cfg.controller.calib_hi;
                if (lo == 0.0 && hi == 0.0) {
                    Workspace ws;
                    hi = loss_only(task.spec, task.w0, task.data, {}, ws);
                }
                CalibrationResult cal = calibrate_final_performance_full(
                    task.spec, task.w0, task.data, cfg.reward, {lo, hi},
                    cfg.controller.alpha);
                p_base = cal.p_final;
                art.calibration = std::move(cal);
            } else {
                throw ConfigError("controller.p_final_mode: unknown mode '" +
                                  cfg.controller.p_final_mode + "'");
            }
            const double p_hat = p_base * cfg.controller.pt_ratio;
            art.resolved_p_final = p_hat;
            ClosedLoopConfig cc;
            cc.beta = cfg.reward.beta;
            cc.p_final_estimate = p_hat;
            cc.alpha = cfg.controller.alpha;
            ClosedLoopResult ep = run_closed_loop_episode(
                task.spec, task.w0, task.data,
                [&cc](double p, double) { return mu_closed_loop(p, cc); }, cfg.reward,
                cfg.controller.alpha);
            art.schedule = std::move(ep.realized);
            art.trajectory = std::move(ep.trajectory);
            break;
        }
    }

    art.total_reward = cumulative_reward(art.trajectory, art.schedule, cfg.reward);
    art.total_effort = total_effort(art.schedule, cfg.reward);
    art.final_p = art.trajectory.final_performance();
    art.mu0 = art.schedule.values.empty() ? 0.0 : art.schedule.values.front();
    return art;
}

namespace {

std::ofstream open_csv(const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw Error("cannot open " + p.string() + " for writing");
    f << std::setprecision(17);
    return f;
}

}  // namespace

void write_run_artifacts(const fs::path& dir, const RunArtifacts& art,
                         const RewardParams& params) {
    fs::create_directories(dir);
    {
        auto f = open_csv(dir / "schedule.csv");
        f << "step,t,mu\n";
        for (std::size_t k = 0; k < art.schedule.size(); ++k)
            f << k << ',' << static_cast<double>(k) * art.schedule.dt << ','
              << art.schedule.values[k] << '\n';
    }
    {
        auto f = open_csv(dir / "trajectory.csv");
        f << "step,t,P,reward_rate,cumulative_reward\n";
        const double lg = std::log(params.gamma);
        double cum = 0.0;
        for (std::size_t k = 0; k < art.schedule.size(); ++k) {
            const double t = static_cast<double>(k) * art.schedule.dt;
            const double mu = art.schedule.values[k];
            const double rate =
                art.trajectory.performance[k] - params.beta * mu * mu;
            cum += art.schedule.dt * std::exp(t * lg) * rate;
            f << k << ',' << t << ',' << art.trajectory.performance[k] << ',' << rate
              << ',' << cum << '\n';
        }
    }
    {
        auto f = open_csv(dir / "summary.csv");
        f << "total_reward,total_effort,final_P,mu0,p_final_estimate\n";
        f << art.total_reward << ',' << art.total_effort << ',' << art.final_p << ','
          << art.mu0 << ',' << art.resolved_p_final << '\n';
    }
    if (art.meta) {
        auto f = open_csv(dir / "meta_diagnostics.csv");
        f << "iteration,objective,step_size,grad_norm\n";
        for (const MetaIterRow& r : art.meta->history)
            f << r.iter << ',' << r.objective << ',' << r.step_size << ','
              << r.grad_norm << '\n';
    }
    if (art.calibration) {
        auto f = open_csv(dir / "calibration.csv");
        f << "candidate_p_final,cumulative_reward\n";
        for (const auto& [x, r] : art.calibration->samples)
            f << x << ',' << r << '\n';
    }
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& log) {
    const fs::path out(cfg.output_dir);
    try {
        RunArtifacts art = run_experiment(cfg);
        write_run_artifacts(out, art, cfg.reward);
        log << "run ok: total_reward=" << art.total_reward
            << " total_effort=" << art.total_effort << " final_P=" << art.final_p
            << " -> " << out.string() << "\n";
        if (art.calibration && art.calibration->unimodal_warning)
            log << "warning: calibration objective peaked at the search-interval edge\n";
        return 0;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fs::create_directories(out);
        std::ofstream diag(out / "diagnostics.txt");
        diag << e.what() << "\n";
        log << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log) {
    if (!cfg.sweep) throw ConfigError("sweep: missing sweep grid in config");
    const SweepConfig& sw = *cfg.sweep;
    {   // validate the field name before spawning workers
        ExperimentConfig probe = cfg;
        apply_scalar_override(probe, sw.name, sw.values.front());
    }
    const fs::path out(cfg.output_dir);
    fs::create_directories(out);

    // The misestimation/scale sweeps reuse one expensive base resolution.
    SharedResolution shared;
    const bool shareable =
        sw.name == "controller.pt_ratio" || sw.name == "controller.scale";
    if (shareable && cfg.controller.type == ControllerConfig::Type::ClosedLoop &&
        cfg.controller.p_final_mode == "meta") {
        BuiltTask task = build_task(cfg.task, cfg.reward, cfg.seed);
        MetaOptResult res =
            meta_optimize(task.spec, task.w0, task.data, cfg.reward,
                          default_meta_init(task, cfg.reward), cfg.meta);
        shared.p_final = res.trajectory.final_performance();
    }
    if (shareable && cfg.controller.type == ControllerConfig::Type::Profile &&
        cfg.controller.profile == "learn_then_rest" &&
        cfg.controller.shape_from == "meta") {
        BuiltTask task = build_task(cfg.task, cfg.reward, cfg.seed);
        MetaOptResult res =
            meta_optimize(task.spec, task.w0, task.data, cfg.reward,
                          default_meta_init(task, cfg.reward), cfg.meta);
        shared.shape = res.schedule;
    }

    struct Row {
        double mu0 = 0.0, reward = 0.0, effort = 0.0, final_p = 0.0;
        std::string status = "ok";
    };
    std::vector<Row> rows(sw.values.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> failures{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= sw.values.size()) return;
            ExperimentConfig point = cfg;
            point.sweep.reset();
            apply_scalar_override(point, sw.name, sw.values[i]);
            char sub[32];
            std::snprintf(sub, sizeof sub, "point_%03zu", i);
            point.output_dir = (out / sub).string();
            try {
                RunArtifacts art =
                    run_experiment(point, shareable ? &shared : nullptr);
                write_run_artifacts(point.output_dir, art, point.reward);
                rows[i] = {art.mu0, art.total_reward, art.total_effort, art.final_p,
                           "ok"};
            } catch (const Error& e) {
                rows[i].status = e.what();
                failures.fetch_add(1);
            }
        }
    };
    const std::size_t n_workers =
        std::max<std::size_t>(1, std::min(cfg.workers, sw.values.size()));
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < n_workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    auto f = open_csv(out / "sweep.csv");
    f << "index," << sw.name << ",mu0,total_reward,total_effort,final_P,status\n";
    for (std::size_t i = 0; i < sw.values.size(); ++i) {
        std::string status = rows[i].status;
        std::replace(status.begin(), status.end(), ',', ';');
        f << i << ',' << sw.values[i] << ',' << rows[i].mu0 << ',' << rows[i].reward
          << ',' << rows[i].effort << ',' << rows[i].final_p << ',' << status << '\n';
    }
    log << "sweep ok: " << sw.values.size() - failures.load() << "/"
        << sw.values.size() << " points succeeded -> " << out.string() << "\n";
    return failures.load() == sw.values.size() ? 3 : 0;
}

namespace {

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= v.size()) return v.back();
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

std::vector<double> moving_average(const std::vector<double>& v, std::size_t window) {
    if (window <= 1) return v;
    std::vector<double> out(v.size(), 0.0);
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(window) / 2;
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(v.size()); ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
        const std::ptrdiff_t hi =
            std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(v.size()) - 1, i + half);
        double acc = 0.0;
        for (std::ptrdiff_t k = lo; k <= hi; ++k) acc += v[k];
        out[i] = acc / static_cast<double>(hi - lo + 1);
    }
    return out;
}

}  // namespace

MetaLearnSummary run_metalearn(const ExperimentConfig& cfg,
                               const fs::path* out_dir) {
    if (!cfg.estimator)
        throw ConfigError("metalearn: estimator config is required");
    cfg.reward.validate();
    EstimatorConfig ecfg = *cfg.estimator;
    ecfg.dt = cfg.reward.dt;
    MemoryStore store(ecfg);
    const std::size_t steps = cfg.reward.step_count();
    const std::size_t episodes = cfg.metalearn.episodes;
    const double alpha = cfg.controller.alpha;
    const double beta = cfg.reward.beta;

    struct Trace {
        std::vector<double> phat;  // estimate before each step; empty for episode 0
        double p_final = 0.0;
        double std_p = 0.0;
    };
    std::vector<Trace> traces(episodes);

    auto run_driven_episode = [&](std::uint64_t ep_seed, std::vector<double>* phat,
                                  const MemoryStore& mem) {
        BuiltTask t = build_task(cfg.task, cfg.reward, ep_seed);
        Trajectory observed;
        observed.dt = cfg.reward.dt;
        Controller ctl = [&](double p, double) {
            observed.performance.push_back(p);
            const Estimate est =
                estimate_final_performance(mem, observed, observed.size());
            if (phat) phat->push_back(est.p_final);
            ClosedLoopConfig cc;
            cc.beta = beta;
            cc.p_final_estimate = est.p_final;
            cc.alpha = alpha;
            return mu_closed_loop(p, cc);
        };
        return run_closed_loop_episode(t.spec, t.w0, t.data, ctl, cfg.reward, alpha);
    };

    for (std::size_t e = 0; e < episodes; ++e) {
        const std::uint64_t ep_seed = Rng::mix(cfg.seed, e);
        Trajectory traj;
        if (store.empty()) {
            // Bootstrap: the base rate alone generates the first trajectory.
            BuiltTask t = build_task(cfg.task, cfg.reward, ep_seed);
            Schedule zero;
            zero.dt = cfg.reward.dt;
            zero.values.assign(steps, 0.0);
            traj = simulate_episode(t.spec, t.w0, t.data, zero, alpha).trajectory;
        } else {
            traj = run_driven_episode(ep_seed, &traces[e].phat, store).trajectory;
        }
        traces[e].p_final = traj.final_performance();
        {
            const double n = static_cast<double>(traj.size());
            const double mean = kern::ops().sum(traj.performance.data(), traj.size()) / n;
            traces[e].std_p = std::sqrt(
                kern::ops().sumsqdiff(traj.performance.data(), traj.size(), mean) / n);
        }
        store.commit(std::move(traj));
    }

    MetaLearnSummary summary;
    summary.episodes = episodes;
    summary.steps_per_episode = steps;

    // Frozen-memory evaluation at t = 0.5 T.
    const std::size_t half_upto = steps / 2 + 1;
    std::vector<MemoryStore> frozen;
    for (std::size_t m : cfg.metalearn.eval_memory_sizes) {
        if (m > store.size()) continue;
        MemoryStore sub(ecfg);
        for (std::size_t h = 0; h < m; ++h) sub.commit(store.episode(h));
        frozen.push_back(std::move(sub));
        summary.eval_memory_sizes.push_back(m);
    }
    std::vector<std::vector<double>> eval_errors(frozen.size());
    for (std::size_t e = 0; e < cfg.metalearn.eval_episodes; ++e) {
        const std::uint64_t ep_seed = Rng::mix(cfg.seed, kEvalSalt + e);
        const auto ep = run_driven_episode(ep_seed, nullptr, store);
        Trajectory prefix;
        prefix.dt = ep.trajectory.dt;
        prefix.performance.assign(ep.trajectory.performance.begin(),
                                  ep.trajectory.performance.begin() + half_upto);
        const double p_true = ep.trajectory.final_performance();
        for (std::size_t fi = 0; fi < frozen.size(); ++fi) {
            const Estimate est =
                estimate_final_performance(frozen[fi], prefix, half_upto);
            eval_errors[fi].push_back(est.p_final - p_true);
        }
    }
    for (const auto& errs : eval_errors)
        summary.eval_iqr.push_back(quantile(errs, 0.75) - quantile(errs, 0.25));

    if (out_dir) {
        fs::create_directories(*out_dir);
        {
            auto f = open_csv(*out_dir / "estimation_errors.csv");
            f << "episode,step,t,p_hat,p_final,error\n";
            for (std::size_t e = 0; e < episodes; ++e) {
                const Trace& tr = traces[e];
                for (std::size_t k = 0; k < tr.phat.size(); ++k)
                    f << e << ',' << k << ',' << static_cast<double>(k) * cfg.reward.dt
                      << ',' << tr.phat[k] << ',' << tr.p_final << ','
                      << tr.phat[k] - tr.p_final << '\n';
            }
        }
        {
            // Percentile bands grouped by memory size at run time,
            // smoothed with a centered moving average (window = 5% of steps).
            auto f = open_csv(*out_dir / "fig3c_percentiles.csv");
            f << "bucket_max_memory,step,t,p25_smoothed,p75_smoothed\n";
            const std::size_t window = std::max<std::size_t>(1, steps / 20);
            std::size_t lo_edge = 0;
            for (std::size_t hi_edge : cfg.metalearn.percentile_buckets) {
                std::vector<std::size_t> members;
                for (std::size_t e = 1; e < episodes; ++e)
                    if (e > lo_edge && e <= hi_edge) members.push_back(e);
                lo_edge = hi_edge;
                if (members.empty()) continue;
                std::vector<double> p25(steps, 0.0), p75(steps, 0.0), col;
                for (std::size_t k = 0; k < steps; ++k) {
                    col.clear();
                    for (std::size_t e : members)
                        if (k < traces[e].phat.size())
                            col.push_back(traces[e].phat[k] - traces[e].p_final);
                    p25[k] = quantile(col, 0.25);
                    p75[k] = quantile(col, 0.75);
                }
                p25 = moving_average(p25, window);
                p75 = moving_average(p75, window);
                for (std::size_t k = 0; k < steps; ++k)
                    f << hi_edge << ',' << k << ','
                      << static_cast<double>(k) * cfg.reward.dt << ',' << p25[k] << ','
                      << p75[k] << '\n';
            }
        }
        {
            // Scatter data: trajectory variability vs estimation error at 0.5 T.
            auto f = open_csv(*out_dir / "fig3d_scatter.csv");
            f << "episode,std_P,error_at_half_T\n";
            for (std::size_t e = 1; e < episodes; ++e) {
                const Trace& tr = traces[e];
                const std::size_t k = std::min(tr.phat.size() - 1, steps / 2);
                f << e << ',' << tr.std_p << ',' << tr.phat[k] - tr.p_final << '\n';
            }
        }
        if (!summary.eval_memory_sizes.empty()) {
            auto f = open_csv(*out_dir / "iqr_summary.csv");
            f << "memory_size,iqr,n_eval\n";
            for (std::size_t i = 0; i < summary.eval_memory_sizes.size(); ++i)
                f << summary.eval_memory_sizes[i] << ',' << summary.eval_iqr[i] << ','
                  << cfg.metalearn.eval_episodes << '\n';
        }
        store.save(*out_dir / "memory_store.txt");
    }
    return summary;
}

int cmd_metalearn(const ExperimentConfig& cfg, std::ostream& log) {
    const fs::path out(cfg.output_dir);
    try {
        const MetaLearnSummary s = run_metalearn(cfg, &out);
        log << "metalearn ok: " << s.episodes << " episodes -> " << out.string()
            << "\n";
        for (std::size_t i = 0; i < s.eval_memory_sizes.size(); ++i)
            log << "  memory " << s.eval_memory_sizes[i]
                << ": error IQR at 0.5T = " << s.eval_iqr[i] << "\n";
        return 0;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fs::create_directories(out);
        std::ofstream diag(out / "diagnostics.txt");
        diag << e.what() << "\n";
        log << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

int cmd_calibrate(const ExperimentConfig& cfg, std::ostream& log) {
    const fs::path out(cfg.output_dir);
    try {
        BuiltTask task = build_task(cfg.task, cfg.reward, cfg.seed);
        double lo = cfg.controller.calib_lo, hi = cfg.controller.calib_hi;
        if (lo == 0.0 && hi == 0.0) {
            Workspace ws;
            hi = loss_only(task.spec, task.w0, task.data, {}, ws);
        }
        const CalibrationResult cal = calibrate_final_performance_full(
            task.spec, task.w0, task.data, cfg.reward, {lo, hi},
            cfg.controller.alpha);
        fs::create_directories(out);
        auto f = open_csv(out / "calibration.csv");
        f << "candidate_p_final,cumulative_reward\n";
        for (const auto& [x, r] : cal.samples) f << x << ',' << r << '\n';
        log << "calibrate ok: p_final=" << cal.p_final
            << " best_reward=" << cal.best_reward << " -> " << out.string() << "\n";
        if (cal.unimodal_warning)
            log << "warning: objective peaked at the search-interval edge\n";
        return 0;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fs::create_directories(out);
        std::ofstream diag(out / "diagnostics.txt");
        diag << e.what() << "\n";
        log << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace lrsched
