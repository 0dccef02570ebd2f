#include "lrsched/controllers.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "lrsched/errors.hpp"

namespace lrsched {

void ClosedLoopConfig::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw DomainError("ClosedLoopConfig: beta must be positive");
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw DomainError("ClosedLoopConfig: alpha must be nonnegative");
    if (!std::isfinite(p_final_estimate))
        throw DomainError("ClosedLoopConfig: non-finite final-performance estimate");
}

double mu_closed_loop(double p_t, const ClosedLoopConfig& cfg) {
    cfg.validate();
    if (!std::isfinite(p_t)) throw DomainError("mu_closed_loop: non-finite performance");
    double radicand = (cfg.p_final_estimate - p_t) / cfg.beta;
    const bool clamped = radicand < 0.0;
    if (clamped) {
        if (!cfg.clamp_negative)
            throw DomainError("mu_closed_loop: current performance exceeds the final estimate");
        radicand = 0.0;
    }
    if (cfg.alpha == 0.0) {
        const double mu = std::sqrt(radicand);
        // First integral by construction: beta*mu^2 + P = P_hat(T) whenever the
        // radicand is nonnegative.
        assert(clamped ||
               std::fabs(cfg.beta * mu * mu + p_t - cfg.p_final_estimate) <=
                   1e-9 * std::max({1.0, std::fabs(cfg.p_final_estimate),
                                    std::fabs(p_t)}));
        return mu;
    }
    return std::max(0.0, -cfg.alpha + std::sqrt(radicand + cfg.alpha * cfg.alpha));
}

void PerceptronTask::validate() const {
    if (!(sigma2 > 0.0)) throw DomainError("PerceptronTask: sigma2 must be positive");
    if (!(d >= 0.0)) throw DomainError("PerceptronTask: distance must be nonnegative");
    if (!(beta > 0.0)) throw DomainError("PerceptronTask: beta must be positive");
    if (!(T > 0.0)) throw DomainError("PerceptronTask: horizon must be positive");
}

double OpenLoopSolution::analytic_loss(double t) const {
    const double s2 = task.sigma2;
    const double c_T = std::cos(s2 * theta * task.T);
    const double c_t = std::cos(s2 * theta * (task.T - t));
    const double ratio = c_T / c_t;
    return 0.5 * s2 * task.d * task.d * ratio * ratio;
}

OpenLoopSolution solve_theta(const PerceptronTask& task) {
    task.validate();
    OpenLoopSolution sol;
    sol.task = task;
    if (task.d == 0.0) {
        sol.theta = 0.0;
        return sol;
    }
    const double s2 = task.sigma2;
    const double k = std::sqrt(s2) * task.d / std::sqrt(2.0 * task.beta);
    const double upper_edge = M_PI_2 / (s2 * task.T);
    const double hi0 = upper_edge * (1.0 - 1e-9);
    auto f = [&](double th) { return th - k * std::cos(s2 * th * task.T); };
    double lo = 0.0, hi = hi0;
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) {
        sol.theta = lo;
        return sol;
    }
    if (flo * fhi > 0.0)
        throw SolverError("solve_theta: no sign change on [" + std::to_string(lo) +
                          ", " + std::to_string(hi) + "]");
    // f is strictly increasing on the bracket (1 + k s2 T sin(...) > 0), so the
    // bisection limit is the smallest nonnegative root.
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::fabs(fm) <= 1e-12) break;
        if (flo * fm <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    if (std::fabs(f(mid)) > 1e-12)
        throw SolverError("solve_theta: bisection failed to reach |f| <= 1e-12");
    sol.theta = mid;
    return sol;
}

double mu_open_loop(double t, const OpenLoopSolution& sol) {
    const double T = sol.task.T;
    const double slack = 1e-9 * std::max(1.0, T);
    if (t < -slack || t > T + slack)
        throw DomainError("mu_open_loop: t outside [0, T]");
    t = std::clamp(t, 0.0, T);
    return sol.theta * std::tan(sol.task.sigma2 * sol.theta * (T - t));
}

double mu_discounted_approx(double grad_sq, double t, const RewardParams& params) {
    params.validate();
    if (!(grad_sq >= 0.0) || !std::isfinite(grad_sq))
        throw DomainError("mu_discounted_approx: grad_sq must be nonnegative");
    const double T = params.horizon_T;
    const double slack = 1e-9 * std::max(1.0, T);
    if (t < -slack || t > T + slack)
        throw DomainError("mu_discounted_approx: t outside [0, T]");
    if (t >= T) return 0.0;  // 1/(T-t) diverges; the limit is zero
    const double denom = 1.0 / (T - t) - 0.5 * std::log(params.gamma);
    return grad_sq / (2.0 * params.beta * denom);
}

Schedule make_profile(ProfileKind kind, double scale, std::size_t steps, double dt,
                      const Schedule* shape_source) {
    if (!(scale >= 0.0) || !std::isfinite(scale))
        throw DomainError("make_profile: scale must be nonnegative");
    if (steps == 0) throw DomainError("make_profile: need at least one step");
    Schedule s;
    s.dt = dt;
    s.values.resize(steps);
    switch (kind) {
        case ProfileKind::Flat:
            std::fill(s.values.begin(), s.values.end(), scale);
            break;
        case ProfileKind::RampUp:
            if (steps == 1) {
                s.values[0] = scale;
            } else {
                for (std::size_t i = 0; i < steps; ++i)
                    s.values[i] = scale * static_cast<double>(i) /
                                  static_cast<double>(steps - 1);
            }
            break;
        case ProfileKind::LearnThenRest: {
            if (!shape_source)
                throw ContractError("make_profile: learn_then_rest needs a shape source");
            if (shape_source->size() != steps)
                throw ContractError("make_profile: shape source length mismatch");
            const double peak =
                *std::max_element(shape_source->values.begin(), shape_source->values.end());
            if (peak <= 0.0) {
                std::fill(s.values.begin(), s.values.end(), 0.0);
            } else {
                const double f = scale / peak;
                for (std::size_t i = 0; i < steps; ++i)
                    s.values[i] = shape_source->values[i] * f;
            }
            break;
        }
    }
    return s;
}

}  // namespace lrsched
