#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lrsched/controllers.hpp"
#include "lrsched/dynamics.hpp"
#include "lrsched/errors.hpp"
#include "lrsched/tasks.hpp"

using namespace lrsched;

TEST_CASE("closed-loop rule: gap cases") {
    ClosedLoopConfig cfg;
    cfg.beta = 1.0;
    cfg.p_final_estimate = 1.0;
    CHECK(mu_closed_loop(1.0, cfg) == 0.0);  // mastered task stops learning
    CHECK(mu_closed_loop(0.0, cfg) == doctest::Approx(1.0));

    cfg.beta = 0.8;
    cfg.p_final_estimate = 0.067;
    CHECK(mu_closed_loop(0.0, cfg) == doctest::Approx(0.28940).epsilon(1e-4));
}

TEST_CASE("closed-loop rule: clamping and the alpha variant") {
    ClosedLoopConfig cfg;
    cfg.beta = 2.0;
    cfg.p_final_estimate = 0.5;
    CHECK(mu_closed_loop(0.9, cfg) == 0.0);  // overshoot clamps to zero
    cfg.clamp_negative = false;
    CHECK_THROWS_AS(mu_closed_loop(0.9, cfg), DomainError);

    ClosedLoopConfig a;
    a.beta = 1.0;
    a.p_final_estimate = 1.0;
    a.alpha = 2.0;
    CHECK(mu_closed_loop(0.0, a) == doctest::Approx(-2.0 + std::sqrt(5.0)));
    CHECK(mu_closed_loop(1.0, a) == 0.0);
    // alpha variant also clamps negative gaps to zero effort
    CHECK(mu_closed_loop(2.0, a) == 0.0);
}

TEST_CASE("closed-loop rule is nonincreasing in current performance") {
    ClosedLoopConfig cfg;
    cfg.beta = 0.7;
    cfg.p_final_estimate = 2.0;
    double prev = mu_closed_loop(-1.0, cfg);
    for (double p = -0.8; p < 2.5; p += 0.2) {
        const double mu = mu_closed_loop(p, cfg);
        CHECK(mu <= prev + 1e-15);
        prev = mu;
    }
}

TEST_CASE("theta solver: nothing to learn and the cosine fixed point") {
    PerceptronTask t{1.0, 0.0, 0.5, 1.0};
    CHECK(solve_theta(t).theta == 0.0);

    // sigma=d=T=1, beta=0.5 makes sigma*d/sqrt(2 beta) = 1: theta = cos(theta).
    PerceptronTask dottie{1.0, 1.0, 0.5, 1.0};
    const OpenLoopSolution sol = solve_theta(dottie);
    CHECK(sol.theta == doctest::Approx(0.7390851332).epsilon(1e-9));
    CHECK(std::fabs(sol.theta - std::cos(sol.theta)) <= 1e-12);
}

TEST_CASE("theta shrinks monotonically as effort cost grows") {
    double prev = 1e300;
    for (double beta : {0.2, 0.5, 1.0, 5.0, 20.0, 100.0, 1000.0}) {
        PerceptronTask t{1.0, 1.0, beta, 1.0};
        const double th = solve_theta(t).theta;
        CHECK(th < prev);
        prev = th;
    }
    PerceptronTask big{1.0, 1.0, 1000.0, 1.0};
    CHECK(solve_theta(big).theta < 0.05);
}

TEST_CASE("theta residual meets the 1e-12 stopping rule over random tasks") {
    for (int i = 0; i < 50; ++i) {
        const double sigma2 = 0.2 + 0.3 * i;
        const double d = 0.1 + 0.07 * i;
        const double beta = 0.05 + 0.11 * i;
        const double T = 0.2 + 0.2 * (i % 9);
        PerceptronTask t{sigma2, d, beta, T};
        const OpenLoopSolution sol = solve_theta(t);
        const double k = std::sqrt(sigma2) * d / std::sqrt(2.0 * beta);
        CHECK(std::fabs(sol.theta - k * std::cos(sigma2 * sol.theta * T)) <= 1e-12);
        CHECK(sigma2 * sol.theta * T < M_PI_2);
    }
}

TEST_CASE("open-loop schedule values") {
    PerceptronTask dottie{1.0, 1.0, 0.5, 1.0};
    const OpenLoopSolution sol = solve_theta(dottie);
    CHECK(mu_open_loop(1.0, sol) == 0.0);
    // theta = cos(theta) turns theta*tan(theta) into sin(theta)
    CHECK(mu_open_loop(0.0, sol) == doctest::Approx(std::sin(sol.theta)).epsilon(1e-9));
    CHECK(mu_open_loop(0.0, sol) == doctest::Approx(0.67361).epsilon(1e-4));
    double prev = mu_open_loop(0.0, sol);
    for (double t = 0.05; t <= 1.0; t += 0.05) {
        const double mu = mu_open_loop(t, sol);
        CHECK(mu < prev);
        prev = mu;
    }
    CHECK_THROWS_AS(mu_open_loop(-0.1, sol), DomainError);
    CHECK_THROWS_AS(mu_open_loop(1.2, sol), DomainError);
}

TEST_CASE("first integral holds algebraically along the analytic trajectory") {
    PerceptronTask t{2.0, 0.7, 0.3, 1.5};
    const OpenLoopSolution sol = solve_theta(t);
    const double lT = sol.analytic_loss(t.T);
    for (double tt = 0.0; tt <= t.T + 1e-12; tt += t.T / 40.0) {
        const double mu = mu_open_loop(std::min(tt, t.T), sol);
        const double lt = sol.analytic_loss(std::min(tt, t.T));
        CHECK(t.beta * mu * mu == doctest::Approx(lt - lT).epsilon(1e-9));
    }
}

TEST_CASE("open/closed-loop consistency along a simulated trajectory") {
    auto bundle = make_linear_regression(3, 0.8, 1.5, 64, 11);
    RewardParams params{0.4, 1.0, 1.0, 0.001};
    PerceptronTask task = complete_task(bundle.task, params);
    const OpenLoopSolution sol = solve_theta(task);
    const std::size_t steps = params.step_count();
    Schedule sched;
    sched.dt = params.dt;
    for (std::size_t k = 0; k < steps; ++k)
        sched.values.push_back(mu_open_loop(static_cast<double>(k) * params.dt, sol));
    auto ep = simulate_episode(bundle.spec, bundle.w0, bundle.data, sched);

    ClosedLoopConfig cc;
    cc.beta = params.beta;
    cc.p_final_estimate = ep.trajectory.final_performance();
    double max_dev = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double mu_cl = mu_closed_loop(ep.trajectory.performance[k], cc);
        max_dev = std::max(max_dev, std::fabs(mu_cl - sched.values[k]));
    }
    CHECK(max_dev <= 10.0 * params.dt * sched.values.front());
}

TEST_CASE("mu(0) monotone in beta and d over 10-point sweeps") {
    auto mu0 = [](double beta, double d) {
        PerceptronTask t{1.0, d, beta, 10.0};
        return mu_open_loop(0.0, solve_theta(t));
    };
    double prev = 1e300;
    for (int i = 0; i < 10; ++i) {
        const double beta = 0.2 + (3.0 - 0.2) * i / 9.0;
        const double v = mu0(beta, 1.0);
        CHECK(v < prev);
        prev = v;
    }
    prev = -1.0;
    for (int i = 0; i < 10; ++i) {
        const double d = 0.1 + (1.0 - 0.1) * i / 9.0;
        const double v = mu0(0.1, d);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("discounted leading-order rule") {
    RewardParams p{2.0, 1.0, 1.0, 0.1};
    // gamma = 1 reduces to grad_sq (T-t) / (2 beta)
    CHECK(mu_discounted_approx(0.8, 0.3, p) == doctest::Approx(0.8 * 0.7 / 4.0));
    CHECK(mu_discounted_approx(0.8, 1.0, p) == 0.0);  // limit at t = T
    p.gamma = 0.5;
    CHECK(mu_discounted_approx(0.8, 1.0, p) == 0.0);
    CHECK_THROWS_AS(mu_discounted_approx(-0.1, 0.3, p), DomainError);
    CHECK_THROWS_AS(mu_discounted_approx(0.8, 1.5, p), DomainError);

    // strictly increasing in gamma at fixed t and gradient
    double prev = -1.0;
    for (double g : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95}) {
        RewardParams q{2.0, g, 1.0, 0.1};
        const double v = mu_discounted_approx(0.8, 0.3, q);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("profile construction") {
    Schedule flat = make_profile(ProfileKind::Flat, 0.413, 5, 0.01);
    for (double v : flat.values) CHECK(v == 0.413);

    Schedule ramp = make_profile(ProfileKind::RampUp, 1.0, 3, 0.01);
    CHECK(ramp.values[0] == 0.0);
    CHECK(ramp.values[1] == doctest::Approx(0.5));
    CHECK(ramp.values[2] == doctest::Approx(1.0));

    Schedule src;
    src.dt = 0.01;
    src.values = {0.2, 0.6, 0.3};
    Schedule same = make_profile(ProfileKind::LearnThenRest, 0.6, 3, 0.01, &src);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(same.values[i] == doctest::Approx(src.values[i]));
    Schedule rescaled = make_profile(ProfileKind::LearnThenRest, 1.2, 3, 0.01, &src);
    CHECK(rescaled.values[1] == doctest::Approx(1.2));

    CHECK_THROWS_AS(make_profile(ProfileKind::LearnThenRest, 1.0, 3, 0.01, nullptr),
                    ContractError);
    CHECK_THROWS_AS(make_profile(ProfileKind::Flat, -1.0, 3, 0.01), DomainError);
}
