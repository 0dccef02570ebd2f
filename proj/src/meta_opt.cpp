#include "lrsched/meta_opt.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "lrsched/controllers.hpp"
#include "lrsched/errors.hpp"
#include "lrsched/kernels.hpp"

namespace lrsched {

void MetaOptConfig::validate() const {
    if (outer_steps < 1) throw DomainError("MetaOptConfig: outer_steps must be >= 1");
    if (!(rel_tol > 0.0)) throw DomainError("MetaOptConfig: rel_tol must be positive");
    if (knot_stride < 1) throw DomainError("MetaOptConfig: knot_stride must be >= 1");
    if (!(outer_step_size >= 0.0))
        throw DomainError("MetaOptConfig: outer_step_size must be nonnegative");
}

namespace {

// Unrolled-training objective with state recording and adjoint reverse sweep.
class UnrolledProblem {
public:
    UnrolledProblem(const ModelSpec& spec, const Weights& w0, const TaskData& data,
                    const RewardParams& params)
        : spec_(spec), w0_(w0), data_(data), params_(params) {
        spec_.validate();
        data_.validate(spec_);
        steps_ = params_.step_count();
        np_ = spec_.param_count();
        lref_ = loss_only(spec_, w0_, data_, {}, ws_);
        log_gamma_ = std::log(params_.gamma);
        scratch_.flat.assign(np_, 0.0);
        grad_.assign(np_, 0.0);
        hv_.assign(np_, 0.0);
        adj_.assign(np_, 0.0);
    }

    std::size_t steps() const { return steps_; }

    // Simulates the episode; optionally records every weight state (for the
    // reverse sweep) and the realized trajectory.
    double forward(const std::vector<double>& mu, std::vector<double>* states,
                   Trajectory* traj_out) {
        const auto& K = kern::ops();
        if (states) states->resize((steps_ + 1) * np_);
        Trajectory traj;
        traj.dt = params_.dt;
        traj.performance.reserve(steps_ + 1);
        Weights w = w0_;
        const double dt = params_.dt;
        for (std::size_t k = 0; k < steps_; ++k) {
            if (states)
                std::memcpy(states->data() + k * np_, w.flat.data(),
                            np_ * sizeof(double));
            sample_batch(data_, k, batch_);
            double lk;
            try {
                lk = loss_and_gradient(spec_, w, data_, batch_, grad_, ws_);
            } catch (const NumericalError&) {
                throw DivergedError("meta-optimization forward pass diverged",
                                    k == 0 ? 0 : k - 1);
            }
            if (std::fabs(lk) > kDivergenceGuard)
                throw DivergedError("meta-optimization forward pass diverged",
                                    k == 0 ? 0 : k - 1);
            traj.performance.push_back(lref_ - lk);
            K.axpy(-dt * mu[k], grad_.data(), w.flat.data(), np_);
        }
        if (states)
            std::memcpy(states->data() + steps_ * np_, w.flat.data(),
                        np_ * sizeof(double));
        traj.performance.push_back(lref_ - loss_only(spec_, w, data_, {}, ws_));

        Schedule sched;
        sched.dt = dt;
        sched.values = mu;
        const double obj = cumulative_reward(traj, sched, params_);
        if (traj_out) *traj_out = std::move(traj);
        return obj;
    }

    // Adjoint sweep over recorded states. grad_mu[k] = dR/dmu_k.
    void reverse(const std::vector<double>& states, const std::vector<double>& mu,
                 std::vector<double>& grad_mu) {
        const auto& K = kern::ops();
        grad_mu.assign(steps_, 0.0);
        std::fill(adj_.begin(), adj_.end(), 0.0);
        const double dt = params_.dt;
        const double beta = params_.beta;
        for (std::size_t k = steps_; k-- > 0;) {
            std::memcpy(scratch_.flat.data(), states.data() + k * np_,
                        np_ * sizeof(double));
            sample_batch(data_, k, batch_);
            loss_grad_hvp(spec_, scratch_, data_, batch_, adj_, grad_, hv_, ws_);
            const double disc = std::exp(static_cast<double>(k) * dt * log_gamma_);
            grad_mu[k] = -2.0 * beta * mu[k] * dt * disc -
                         dt * K.dot(grad_.data(), adj_.data(), np_);
            // a_k = a_{k+1} - dt*mu_k*H_k a_{k+1} - dt*disc*grad_k
            K.axpy(-dt * mu[k], hv_.data(), adj_.data(), np_);
            K.axpy(-dt * disc, grad_.data(), adj_.data(), np_);
        }
    }

    double finite_difference_knot(const std::vector<double>& mu, std::size_t stride,
                                  std::size_t knot, double eps) {
        std::vector<double> pert = mu;
        const std::size_t lo = knot * stride;
        const std::size_t hi = std::min(steps_, lo + stride);
        for (std::size_t k = lo; k < hi; ++k) pert[k] = mu[k] + eps;
        const double rp = forward(pert, nullptr, nullptr);
        for (std::size_t k = lo; k < hi; ++k) pert[k] = mu[k] - eps;
        const double rm = forward(pert, nullptr, nullptr);
        return (rp - rm) / (2.0 * eps);
    }

private:
    const ModelSpec& spec_;
    const Weights& w0_;
    const TaskData& data_;
    const RewardParams& params_;
    Workspace ws_;
    std::size_t steps_ = 0, np_ = 0;
    double lref_ = 0.0, log_gamma_ = 0.0;
    Weights scratch_;
    std::vector<double> grad_, hv_, adj_;
    std::vector<std::uint32_t> batch_;
};

void expand_knots(const std::vector<double>& knots, std::size_t stride,
                  std::size_t steps, std::vector<double>& mu) {
    mu.resize(steps);
    for (std::size_t k = 0; k < steps; ++k) mu[k] = knots[k / stride];
}

void collapse_steps(const std::vector<double>& g_steps, std::size_t stride,
                    std::vector<double>& g_knots) {
    std::fill(g_knots.begin(), g_knots.end(), 0.0);
    for (std::size_t k = 0; k < g_steps.size(); ++k) g_knots[k / stride] += g_steps[k];
}

}  // namespace

MetaOptResult meta_optimize(const ModelSpec& spec, const Weights& w0,
                            const TaskData& data, const RewardParams& params,
                            const Schedule& init, const MetaOptConfig& cfg) {
    cfg.validate();
    params.validate();
    init.validate();
    UnrolledProblem prob(spec, w0, data, params);
    const std::size_t steps = prob.steps();
    if (init.size() != steps)
        throw ContractError("meta_optimize: init schedule length must equal the step count");

    const std::size_t stride = cfg.knot_stride;
    const std::size_t n_knots = (steps + stride - 1) / stride;
    std::vector<double> knots(n_knots, 0.0);
    for (std::size_t k = 0; k < steps; ++k) knots[k / stride] += init.values[k];
    for (std::size_t j = 0; j < n_knots; ++j) {
        const std::size_t lo = j * stride;
        const std::size_t cnt = std::min(steps, lo + stride) - lo;
        knots[j] = std::max(0.0, knots[j] / static_cast<double>(cnt));
    }

    std::vector<double> mu, cand_mu, g_steps, g_knots(n_knots, 0.0), cand(n_knots);
    std::vector<double> states, cand_states;
    expand_knots(knots, stride, steps, mu);

    MetaOptResult res;
    double r_cur = prob.forward(mu, &states, &res.trajectory);

    double step = cfg.outer_step_size;
    std::size_t flat_count = 0;
    for (std::size_t it = 0; it < cfg.outer_steps; ++it) {
        if (cfg.grad_mode == GradMode::ReverseUnrolled) {
            prob.reverse(states, mu, g_steps);
            collapse_steps(g_steps, stride, g_knots);
        } else {
            for (std::size_t j = 0; j < n_knots; ++j) {
                const double eps = 1e-6 * std::max(1.0, std::fabs(knots[j]));
                g_knots[j] = prob.finite_difference_knot(mu, stride, j, eps);
            }
        }
        double gmax = 0.0, gnorm2 = 0.0;
        for (double g : g_knots) {
            gmax = std::max(gmax, std::fabs(g));
            gnorm2 += g * g;
        }
        const double gnorm = std::sqrt(gnorm2);
        if (step == 0.0) {
            const double mumax =
                *std::max_element(mu.begin(), mu.end()) + 1e-2;
            step = gmax > 0.0 ? 0.1 * mumax / gmax : 1.0;
        }

        bool accepted = false;
        for (int halving = 0; halving < 20; ++halving) {
            for (std::size_t j = 0; j < n_knots; ++j)
                cand[j] = std::max(0.0, knots[j] + step * g_knots[j]);
            expand_knots(cand, stride, steps, cand_mu);
            double r_try;
            try {
                r_try = prob.forward(cand_mu, &cand_states, nullptr);
            } catch (const DivergedError&) {
                step *= 0.5;  // overshoot into divergence: shrink and retry
                continue;
            }
            if (r_try > r_cur) {
                const double rel =
                    (r_try - r_cur) / std::max(std::fabs(r_try), 1e-300);
                flat_count = rel < cfg.rel_tol ? flat_count + 1 : 0;
                knots.swap(cand);
                mu.swap(cand_mu);
                states.swap(cand_states);
                r_cur = r_try;
                accepted = true;
                if (halving == 0) step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        res.history.push_back({it, r_cur, step, gnorm});
        if (!accepted) {
            res.converged = true;
            res.note = "stalled within line-search resolution";
            break;
        }
        if (flat_count >= 5) {
            res.converged = true;
            res.note = "relative objective change below rel_tol";
            break;
        }
    }
    if (!res.converged && res.note.empty()) res.note = "outer iteration budget exhausted";

    res.schedule.dt = params.dt;
    res.schedule.values = mu;
    res.objective = prob.forward(mu, nullptr, &res.trajectory);
    return res;
}

std::vector<double> meta_gradient(const ModelSpec& spec, const Weights& w0,
                                  const TaskData& data, const RewardParams& params,
                                  const Schedule& sched, GradMode mode) {
    params.validate();
    sched.validate();
    UnrolledProblem prob(spec, w0, data, params);
    if (sched.size() != prob.steps())
        throw ContractError("meta_gradient: schedule length must equal the step count");
    std::vector<double> g(prob.steps(), 0.0);
    if (mode == GradMode::ReverseUnrolled) {
        std::vector<double> states;
        prob.forward(sched.values, &states, nullptr);
        prob.reverse(states, sched.values, g);
    } else {
        for (std::size_t k = 0; k < prob.steps(); ++k) {
            const double eps = 1e-6 * std::max(1.0, std::fabs(sched.values[k]));
            g[k] = prob.finite_difference_knot(sched.values, 1, k, eps);
        }
    }
    return g;
}

double schedule_objective(const ModelSpec& spec, const Weights& w0,
                          const TaskData& data, const RewardParams& params,
                          const Schedule& sched) {
    params.validate();
    sched.validate();
    UnrolledProblem prob(spec, w0, data, params);
    if (sched.size() != prob.steps())
        throw ContractError("schedule_objective: schedule length must equal the step count");
    return prob.forward(sched.values, nullptr, nullptr);
}

CalibrationResult calibrate_final_performance_full(
    const ModelSpec& spec, const Weights& w0, const TaskData& data,
    const RewardParams& params, std::pair<double, double> search_interval,
    double alpha) {
    params.validate();
    double a = search_interval.first, b = search_interval.second;
    if (a > b) std::swap(a, b);
    CalibrationResult out;
    if (a == b) {
        out.p_final = a;
        return out;
    }
    auto reward_at = [&](double phat) {
        ClosedLoopConfig cc;
        cc.beta = params.beta;
        cc.p_final_estimate = phat;
        cc.alpha = alpha;
        auto ep = run_closed_loop_episode(
            spec, w0, data,
            [&cc](double p, double) { return mu_closed_loop(p, cc); }, params,
            alpha);
        const double r = cumulative_reward(ep.trajectory, ep.realized, params);
        return r;
    };

    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = reward_at(x1);
    double f2 = reward_at(x2);
    out.samples.push_back({x1, f1});
    out.samples.push_back({x2, f2});
    const double width0 = b - a;
    for (int it = 0; it < 60 && (b - a) > 1e-3 * width0; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = reward_at(x2);
            out.samples.push_back({x2, f2});
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = reward_at(x1);
            out.samples.push_back({x1, f1});
        }
    }
    // Best evaluated sample wins; flag when the maximum sits at the search edge
    // (objective not improving toward the interior).
    auto best = std::max_element(
        out.samples.begin(), out.samples.end(),
        [](const auto& l, const auto& r) { return l.second < r.second; });
    out.p_final = best->first;
    out.best_reward = best->second;
    const double lo_edge = search_interval.first, hi_edge = search_interval.second;
    const double edge_tol = 0.02 * std::fabs(hi_edge - lo_edge);
    if (std::fabs(out.p_final - lo_edge) <= edge_tol ||
        std::fabs(out.p_final - hi_edge) <= edge_tol)
        out.unimodal_warning = true;
    return out;
}

double calibrate_final_performance(const ModelSpec& spec, const Weights& w0,
                                   const TaskData& data, const RewardParams& params,
                                   std::pair<double, double> search_interval,
                                   double alpha) {
    return calibrate_final_performance_full(spec, w0, data, params, search_interval,
                                            alpha)
        .p_final;
}

}  // namespace lrsched
