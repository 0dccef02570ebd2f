#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "lrsched/errors.hpp"
#include "lrsched/estimator.hpp"
#include "lrsched/rng.hpp"

using namespace lrsched;

namespace {

Trajectory traj_of(std::initializer_list<double> vals, double dt = 0.1) {
    Trajectory t;
    t.dt = dt;
    t.performance = vals;
    return t;
}

Trajectory random_traj(Rng& rng, std::size_t n, double dt = 0.1) {
    Trajectory t;
    t.dt = dt;
    double p = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        p += std::fabs(rng.normal());
        t.performance.push_back(p);
    }
    return t;
}

}  // namespace

TEST_CASE("whitening") {
    auto c = whiten(traj_of({3.0, 3.0, 3.0}));
    for (double v : c.performance) CHECK(v == 0.0);

    auto w = whiten(traj_of({0.0, 2.0}));
    CHECK(w.performance[0] == doctest::Approx(-1.0));
    CHECK(w.performance[1] == doctest::Approx(1.0));

    Rng rng(5);
    auto t = random_traj(rng, 40);
    auto w1 = whiten(t);
    auto w2 = whiten(w1);
    for (std::size_t i = 0; i < t.size(); ++i)
        CHECK(std::fabs(w1.performance[i] - w2.performance[i]) <= 1e-9);
}

TEST_CASE("kernel similarity") {
    EstimatorConfig cfg{1.0, 1.0, 0.1, 0};
    auto a = whiten(traj_of({0.0, 1.0, 2.0, 3.0}));
    CHECK(kernel_similarity(a, a, 4, cfg) == doctest::Approx(1.0));

    // single-point hand value: exp(-0.5 * (0-1)^2)
    auto po = traj_of({0.0});
    auto ph = traj_of({1.0});
    CHECK(kernel_similarity(po, ph, 1, cfg) == doctest::Approx(std::exp(-0.5)));

    // rho = 1 reduces the exponent to the mean squared distance / (2 sigma^2)
    Rng rng(7);
    auto x = random_traj(rng, 16);
    auto y = random_traj(rng, 16);
    double msd = 0.0;
    for (std::size_t i = 0; i < 16; ++i) {
        const double d = x.performance[i] - y.performance[i];
        msd += d * d;
    }
    msd /= 16.0;
    cfg.sigma_k = 0.7;
    const double expect = std::exp(-msd / (2.0 * 0.7 * 0.7));
    CHECK(kernel_similarity(x, y, 16, cfg) == doctest::Approx(expect).epsilon(1e-12));

    CHECK_THROWS_AS(kernel_similarity(po, ph, 3, cfg), ContractError);
    CHECK(kernel_similarity(po, ph, 0, cfg) == 1.0);
}

TEST_CASE("recency decay weights recent points more") {
    EstimatorConfig cfg{0.5, 1.0, 1.0, 0};
    // distance concentrated on the most recent point shrinks the kernel more
    auto base = traj_of({0.0, 0.0, 0.0, 0.0}, 1.0);
    auto early = traj_of({1.0, 0.0, 0.0, 0.0}, 1.0);
    auto late = traj_of({0.0, 0.0, 0.0, 1.0}, 1.0);
    const double k_early = kernel_similarity(base, early, 4, cfg);
    const double k_late = kernel_similarity(base, late, 4, cfg);
    CHECK(k_late < k_early);
}

TEST_CASE("estimation: single memory, uniform start, matching pick-out") {
    EstimatorConfig cfg{1.0, 0.1, 0.1, 0};
    MemoryStore store(cfg);
    CHECK_THROWS_AS(estimate_final_performance(store, traj_of({0.0}), 0),
                    EstimatorError);

    store.commit(traj_of({0.0, 0.5, 1.0}));
    auto est = estimate_final_performance(store, traj_of({0.0, 0.1, 0.2}), 2);
    CHECK(est.p_final == doctest::Approx(1.0));
    CHECK(est.weights.size() == 1);
    CHECK(est.weights[0] == doctest::Approx(1.0));

    store.commit(traj_of({0.0, 1.0, 2.0}));
    store.commit(traj_of({0.0, 1.5, 3.0}));
    auto uniform = estimate_final_performance(store, traj_of({0.0}), 0);
    CHECK(uniform.p_final == doctest::Approx(2.0));
    for (double w : uniform.weights) CHECK(w == doctest::Approx(1.0 / 3.0));

    // narrow kernel picks out the matching stored trajectory; memories must be
    // distinct in shape (whitening removes affine differences)
    EstimatorConfig narrow{1.0, 1e-3, 0.1, 0};
    MemoryStore ns(narrow);
    ns.commit(traj_of({0.0, 0.9, 1.0}));
    ns.commit(traj_of({0.0, 0.5, 2.0}));
    ns.commit(traj_of({0.0, 0.1, 4.0}));
    auto picked = estimate_final_performance(ns, traj_of({0.0, 0.25, 1.0}), 3);
    CHECK(picked.weights[1] > 0.999);
    CHECK(picked.p_final == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("weights form a simplex and the estimate stays in the convex hull") {
    Rng rng(13);
    EstimatorConfig cfg{0.9, 0.3, 0.1, 0};
    MemoryStore store(cfg);
    double lo = 1e300, hi = -1e300;
    for (int h = 0; h < 20; ++h) {
        auto t = random_traj(rng, 30);
        lo = std::min(lo, t.final_performance());
        hi = std::max(hi, t.final_performance());
        store.commit(std::move(t));
    }
    for (std::size_t upto : {0u, 1u, 5u, 17u, 30u}) {
        auto obs = random_traj(rng, 30);
        auto est = estimate_final_performance(store, obs, upto);
        double sum = 0.0;
        for (double w : est.weights) {
            CHECK(w >= 0.0);
            CHECK(w <= 1.0 + 1e-12);
            sum += w;
        }
        CHECK(std::fabs(sum - 1.0) <= 1e-12);
        CHECK(est.p_final >= lo - 1e-9);
        CHECK(est.p_final <= hi + 1e-9);
    }
}

TEST_CASE("affine rescaling of the observed trajectory leaves weights unchanged") {
    Rng rng(21);
    EstimatorConfig cfg{0.8, 0.2, 0.1, 0};
    MemoryStore store(cfg);
    for (int h = 0; h < 8; ++h) store.commit(random_traj(rng, 25));
    auto obs = random_traj(rng, 25);
    auto base = estimate_final_performance(store, obs, 19);

    Trajectory scaled = obs;
    for (double& v : scaled.performance) v = 2.0 * v;  // power of two: exact
    auto est2 = estimate_final_performance(store, scaled, 19);
    for (std::size_t h = 0; h < base.weights.size(); ++h)
        CHECK(est2.weights[h] == doctest::Approx(base.weights[h]).epsilon(1e-12));

    Trajectory affine = obs;
    for (double& v : affine.performance) v = 3.7 * v - 11.0;
    auto est3 = estimate_final_performance(store, affine, 19);
    for (std::size_t h = 0; h < base.weights.size(); ++h)
        CHECK(est3.weights[h] == doctest::Approx(base.weights[h]).epsilon(1e-9));
}

TEST_CASE("estimate agrees with whiten + kernel_similarity composed by hand") {
    Rng rng(57);
    EstimatorConfig cfg{0.85, 0.25, 0.1, 0};
    MemoryStore store(cfg);
    for (int h = 0; h < 6; ++h) store.commit(random_traj(rng, 20));
    auto obs = random_traj(rng, 20);
    const std::size_t upto = 13;
    auto est = estimate_final_performance(store, obs, upto);

    auto prefix = [&](const Trajectory& t) {
        Trajectory p;
        p.dt = t.dt;
        p.performance.assign(t.performance.begin(), t.performance.begin() + upto);
        return p;
    };
    const Trajectory wobs = whiten(prefix(obs));
    std::vector<double> k(store.size());
    double total = 0.0;
    for (std::size_t h = 0; h < store.size(); ++h) {
        k[h] = kernel_similarity(wobs, whiten(prefix(store.episode(h))), upto, cfg);
        total += k[h];
    }
    for (std::size_t h = 0; h < store.size(); ++h)
        CHECK(est.weights[h] == doctest::Approx(k[h] / total).epsilon(1e-12));
}

TEST_CASE("kernel underflow falls back to uniform weights") {
    EstimatorConfig cfg{1.0, 1e-8, 1.0, 0};  // tiny width: kernels vanish
    MemoryStore store(cfg);
    store.commit(traj_of({0.0, 100.0, 1.0}));
    store.commit(traj_of({0.0, -100.0, 2.0}));
    auto est = estimate_final_performance(store, traj_of({5.0, 0.0, -5.0}), 3);
    CHECK(est.weights[0] == doctest::Approx(0.5));
    CHECK(est.weights[1] == doctest::Approx(0.5));
}

TEST_CASE("memory store commit, FIFO eviction, round trip") {
    EstimatorConfig cfg{1.0, 0.1, 0.1, 2};
    MemoryStore store(cfg);
    store.commit(traj_of({0.0, 1.0}));
    CHECK(store.size() == 1);
    auto keep = traj_of({0.25, 0.75});
    store.commit(keep);
    store.commit(traj_of({0.5, 0.5}));
    CHECK(store.size() == 2);  // oldest evicted
    CHECK(store.episode(0).performance == keep.performance);

    CHECK_THROWS_AS(store.commit(traj_of({1.0, 2.0, 3.0})), ContractError);
}

TEST_CASE("serialization round-trips bit-exactly") {
    Rng rng(31);
    EstimatorConfig cfg{0.7, 0.1, 0.05, 0};
    MemoryStore store(cfg);
    for (int h = 0; h < 5; ++h) store.commit(random_traj(rng, 12, 0.05));
    const auto path = std::filesystem::temp_directory_path() / "lrsched_mem_test.txt";
    store.save(path);
    MemoryStore loaded = MemoryStore::load(path, cfg);
    REQUIRE(loaded.size() == store.size());
    for (std::size_t h = 0; h < store.size(); ++h)
        CHECK(loaded.episode(h).performance == store.episode(h).performance);
    std::filesystem::remove(path);
}
