#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "lrsched/errors.hpp"
#include "lrsched/reward.hpp"
#include "lrsched/rng.hpp"

using namespace lrsched;

namespace {

Trajectory const_traj(double p, std::size_t entries, double dt) {
    Trajectory t;
    t.dt = dt;
    t.performance.assign(entries, p);
    return t;
}

Schedule const_sched(double mu, std::size_t steps, double dt) {
    Schedule s;
    s.dt = dt;
    s.values.assign(steps, mu);
    return s;
}

}  // namespace

TEST_CASE("internal reward rate") {
    RewardParams p{1.0, 1.0, 1.0, 0.5};
    CHECK(internal_reward_rate(0.0, 0.0, p) == 0.0);
    CHECK(internal_reward_rate(1.0, 1.0, p) == 0.0);
    p.beta = 0.5;
    CHECK(internal_reward_rate(0.5, 0.4, p) == doctest::Approx(0.42));
    CHECK_THROWS_AS(internal_reward_rate(std::numeric_limits<double>::quiet_NaN(), 0.0, p),
                    DomainError);
    CHECK_THROWS_AS(internal_reward_rate(0.0, std::numeric_limits<double>::infinity(), p),
                    DomainError);
}

TEST_CASE("cumulative reward: constant integrand and zero-cost cases") {
    RewardParams p{0.3, 1.0, 2.0, 0.1};
    const std::size_t n = p.step_count();
    CHECK(n == 20);
    auto traj = const_traj(0.7, n + 1, 0.1);
    auto sched = const_sched(0.25, n, 0.1);
    CHECK(cumulative_reward(traj, sched, p) ==
          doctest::Approx(2.0 * (0.7 - 0.3 * 0.25 * 0.25)));

    // mu == 0: reduces to dt * sum P_i over the quadrature steps
    auto zero = const_sched(0.0, n, 0.1);
    Rng rng(5);
    Trajectory rnd;
    rnd.dt = 0.1;
    for (std::size_t i = 0; i <= n; ++i) rnd.performance.push_back(rng.normal());
    double direct = 0.0;
    for (std::size_t i = 0; i < n; ++i) direct += 0.1 * rnd.performance[i];
    CHECK(cumulative_reward(rnd, zero, p) == doctest::Approx(direct));
}

TEST_CASE("cumulative reward: two-term discounted Riemann sum by hand") {
    RewardParams p{1.0, 0.5, 1.0, 0.5};
    auto traj = const_traj(1.0, 3, 0.5);
    auto sched = const_sched(0.0, 2, 0.5);
    const double expect = 0.5 * (1.0 + std::pow(0.5, 0.5));
    CHECK(cumulative_reward(traj, sched, p) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(cumulative_reward(traj, sched, p) == doctest::Approx(0.85355).epsilon(1e-4));
}

TEST_CASE("gamma = 1 equals the undiscounted sum to 1e-12 relative") {
    Rng rng(17);
    RewardParams p{0.8, 1.0, 5.0, 0.05};
    const std::size_t n = p.step_count();
    Trajectory traj;
    traj.dt = p.dt;
    Schedule sched;
    sched.dt = p.dt;
    for (std::size_t i = 0; i <= n; ++i) traj.performance.push_back(rng.normal());
    for (std::size_t i = 0; i < n; ++i) sched.values.push_back(std::fabs(rng.normal()));
    double plain = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        plain += p.dt * (traj.performance[i] - p.beta * sched.values[i] * sched.values[i]);
    const double got = cumulative_reward(traj, sched, p);
    CHECK(std::fabs(got - plain) <= 1e-12 * std::max(1.0, std::fabs(plain)));
}

TEST_CASE("gamma = 1 additivity over a time-grid split") {
    Rng rng(23);
    RewardParams p{0.8, 1.0, 1.0, 0.01};
    const std::size_t n = p.step_count();
    Trajectory traj;
    traj.dt = p.dt;
    Schedule sched;
    sched.dt = p.dt;
    for (std::size_t i = 0; i <= n; ++i) traj.performance.push_back(rng.normal());
    for (std::size_t i = 0; i < n; ++i) sched.values.push_back(std::fabs(rng.normal()));

    const std::size_t cut = 37;
    RewardParams pa = p, pb = p;
    pa.horizon_T = p.dt * static_cast<double>(cut);
    pb.horizon_T = p.dt * static_cast<double>(n - cut);
    Trajectory ta, tb;
    Schedule sa, sb;
    ta.dt = tb.dt = p.dt;
    sa.dt = sb.dt = p.dt;
    ta.performance.assign(traj.performance.begin(), traj.performance.begin() + cut + 1);
    tb.performance.assign(traj.performance.begin() + cut, traj.performance.end());
    sa.values.assign(sched.values.begin(), sched.values.begin() + cut);
    sb.values.assign(sched.values.begin() + cut, sched.values.end());
    const double whole = cumulative_reward(traj, sched, p);
    const double parts = cumulative_reward(ta, sa, pa) + cumulative_reward(tb, sb, pb);
    CHECK(whole == doctest::Approx(parts).epsilon(1e-12));
}

TEST_CASE("cost monotonicity: any single mu increase strictly lowers the reward") {
    Rng rng(31);
    RewardParams p{0.5, 0.9, 1.0, 0.1};
    const std::size_t n = p.step_count();
    Trajectory traj;
    traj.dt = p.dt;
    Schedule sched;
    sched.dt = p.dt;
    for (std::size_t i = 0; i <= n; ++i) traj.performance.push_back(rng.normal());
    for (std::size_t i = 0; i < n; ++i) sched.values.push_back(0.1 + rng.uniform());
    const double base = cumulative_reward(traj, sched, p);
    for (std::size_t i = 0; i < n; ++i) {
        Schedule bumped = sched;
        bumped.values[i] += 0.25;
        CHECK(cumulative_reward(traj, bumped, p) < base);
    }
}

TEST_CASE("total effort") {
    RewardParams p{0.5, 1.0, 0.2, 0.1};
    Schedule s;
    s.dt = 0.1;
    s.values = {1.0, 2.0};
    CHECK(total_effort(s, p) == doctest::Approx(0.25));
    s.values = {0.0, 0.0};
    CHECK(total_effort(s, p) == 0.0);
    RewardParams pm{0.7, 1.0, 0.3, 0.1};
    Schedule sm = const_sched(0.6, 3, 0.1);
    CHECK(total_effort(sm, pm) == doctest::Approx(0.7 * 0.36 * 0.3));
}

TEST_CASE("total effort equals minus the reward of a zero-performance trajectory") {
    Rng rng(41);
    RewardParams p{1.3, 1.0, 1.0, 0.05};
    const std::size_t n = p.step_count();
    Schedule sched;
    sched.dt = p.dt;
    for (std::size_t i = 0; i < n; ++i) sched.values.push_back(std::fabs(rng.normal()));
    auto zero = const_traj(0.0, n + 1, p.dt);
    const double effort = total_effort(sched, p);
    const double reward = cumulative_reward(zero, sched, p);
    CHECK(effort == doctest::Approx(-reward).epsilon(1e-12));
}

TEST_CASE("contract and invariant errors") {
    RewardParams p{1.0, 1.0, 1.0, 0.5};
    auto traj = const_traj(1.0, 4, 0.5);  // needs 3 entries for 2 steps
    auto sched = const_sched(0.1, 2, 0.5);
    CHECK_THROWS_AS(cumulative_reward(traj, sched, p), ContractError);
    CHECK_THROWS_AS((RewardParams{1.0, 0.0, 1.0, 0.5}.validate()), DomainError);
    CHECK_THROWS_AS((RewardParams{1.0, 1.0, 1.0, 0.3}.validate()), DomainError);
    CHECK_THROWS_AS((RewardParams{-1.0, 1.0, 1.0, 0.5}.validate()), DomainError);
    CHECK_NOTHROW((RewardParams{1.0, 1.0, 1.0, 0.5}.validate()));
}
