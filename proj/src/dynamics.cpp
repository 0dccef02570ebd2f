#include "lrsched/dynamics.hpp"

#include <cmath>

#include "lrsched/errors.hpp"
#include "lrsched/kernels.hpp"

namespace lrsched {

namespace {

// Shared Euler loop; mu_of(step, P) supplies the control and may record it.
EpisodeResult run_episode(const ModelSpec& spec, const Weights& w0,
                          const TaskData& data,
                          const std::function<double(std::size_t, double)>& mu_of,
                          std::size_t steps, double dt, double base_rate) {
    spec.validate();
    data.validate(spec);
    Workspace ws;
    const std::size_t np = spec.param_count();
    std::vector<double> grad(np, 0.0);
    std::vector<std::uint32_t> batch;

    Weights w = w0;
    const double lref = loss_only(spec, w, data, {}, ws);

    EpisodeResult res;
    res.trajectory.dt = dt;
    res.trajectory.performance.reserve(steps + 1);

    for (std::size_t k = 0; k < steps; ++k) {
        sample_batch(data, k, batch);
        double lk;
        try {
            lk = loss_and_gradient(spec, w, data, batch, grad, ws);
        } catch (const NumericalError&) {
            throw DivergedError("training dynamics produced a non-finite loss",
                                k == 0 ? 0 : k - 1);
        }
        if (std::fabs(lk) > kDivergenceGuard)
            throw DivergedError("training dynamics diverged past the loss guard",
                                k == 0 ? 0 : k - 1);
        const double pk = lref - lk;
        const double mu = mu_of(k, pk);
        res.trajectory.performance.push_back(pk);
        kern::ops().axpy(-dt * (mu + base_rate), grad.data(), w.flat.data(), np);
    }
    double lfin;
    try {
        lfin = loss_only(spec, w, data, {}, ws);
    } catch (const NumericalError&) {
        throw DivergedError("final evaluation produced a non-finite loss",
                            steps == 0 ? 0 : steps - 1);
    }
    res.trajectory.performance.push_back(lref - lfin);
    res.final_weights = std::move(w);
    return res;
}

}  // namespace

EpisodeResult simulate_episode(const ModelSpec& spec, const Weights& w0,
                               const TaskData& data, const Schedule& sched,
                               double base_rate) {
    sched.validate();
    return run_episode(
        spec, w0, data,
        [&sched](std::size_t k, double) { return sched.values[k]; }, sched.size(),
        sched.dt, base_rate);
}

ClosedLoopResult run_closed_loop_episode(const ModelSpec& spec, const Weights& w0,
                                         const TaskData& data,
                                         const Controller& controller,
                                         const RewardParams& params,
                                         double base_rate) {
    const std::size_t steps = params.step_count();
    ClosedLoopResult out;
    out.realized.dt = params.dt;
    out.realized.values.reserve(steps);
    auto res = run_episode(
        spec, w0, data,
        [&](std::size_t k, double pk) {
            const double mu = controller(pk, static_cast<double>(k) * params.dt);
            if (!(mu >= 0.0) || !std::isfinite(mu))
                throw DomainError("controller returned an invalid learning rate");
            out.realized.values.push_back(mu);
            return mu;
        },
        steps, params.dt, base_rate);
    out.trajectory = std::move(res.trajectory);
    out.final_weights = std::move(res.final_weights);
    return out;
}

}  // namespace lrsched
