#include "lrsched/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "lrsched/errors.hpp"
#include "lrsched/kernels.hpp"

namespace lrsched {

void EstimatorConfig::validate() const {
    if (!(rho > 0.0) || !(rho <= 1.0))
        throw DomainError("EstimatorConfig: rho must be in (0, 1]");
    if (!(sigma_k > 0.0)) throw DomainError("EstimatorConfig: sigma_k must be positive");
    if (!(dt > 0.0)) throw DomainError("EstimatorConfig: dt must be positive");
}

namespace {

struct Moments {
    double mean;
    double inv_std;
};

Moments segment_moments(const double* p, std::size_t n) {
    const auto& K = kern::ops();
    const double mean = K.sum(p, n) / static_cast<double>(n);
    const double var = K.sumsqdiff(p, n, mean) / static_cast<double>(n);
    const double sd = std::sqrt(var);
    return {mean, 1.0 / std::max(sd, 1e-12)};
}

// w[i] = rho^{dt (n - i)} for i in [0, n)
void decay_weights(double rho, double dt, std::size_t n, std::vector<double>& w) {
    w.resize(n);
    if (rho == 1.0) {
        std::fill(w.begin(), w.end(), 1.0);
        return;
    }
    // Fill from the most recent point backwards so underflow only zeroes the
    // oldest (already negligible) weights.
    const double step = std::pow(rho, dt);
    double acc = step;
    for (std::size_t i = n; i-- > 0;) {
        w[i] = acc;
        acc *= step;
    }
}

}  // namespace

Trajectory whiten(const Trajectory& traj) {
    traj.validate();
    const Moments m = segment_moments(traj.performance.data(), traj.size());
    Trajectory out;
    out.dt = traj.dt;
    out.performance.resize(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i)
        out.performance[i] = (traj.performance[i] - m.mean) * m.inv_std;
    return out;
}

double kernel_similarity(const Trajectory& observed, const Trajectory& stored,
                         std::size_t upto_steps, const EstimatorConfig& cfg) {
    cfg.validate();
    if (upto_steps > observed.size() || upto_steps > stored.size())
        throw ContractError("kernel_similarity: upto_steps exceeds a trajectory length");
    if (upto_steps == 0) return 1.0;
    std::vector<double> w;
    decay_weights(cfg.rho, cfg.dt, upto_steps, w);
    const double dist = kern::ops().weighted_pair_sqdist(
        observed.performance.data(), stored.performance.data(), w.data(), upto_steps,
        0.0, 1.0, 0.0, 1.0);
    return std::exp(-dist / (2.0 * static_cast<double>(upto_steps) * cfg.sigma_k *
                             cfg.sigma_k));
}

void MemoryStore::commit(Trajectory traj) {
    traj.validate();
    if (!episodes_.empty() && traj.size() != episodes_.front().size())
        throw ContractError("MemoryStore: committed trajectory length differs from stored episodes");
    episodes_.push_back(std::move(traj));
    if (cfg_.capacity > 0 && episodes_.size() > cfg_.capacity)
        episodes_.erase(episodes_.begin());
}

Estimate estimate_final_performance(const MemoryStore& store,
                                    const Trajectory& observed,
                                    std::size_t upto_steps) {
    const std::size_t H = store.size();
    if (H == 0)
        throw EstimatorError("estimate_final_performance: empty memory store");
    if (upto_steps > observed.size())
        throw ContractError("estimate_final_performance: observed trajectory too short");
    if (upto_steps > store.episode(0).size())
        throw ContractError("estimate_final_performance: stored episodes too short");

    Estimate est;
    est.weights.assign(H, 1.0 / static_cast<double>(H));

    if (upto_steps > 0) {
        const auto& K = kern::ops();
        const EstimatorConfig& cfg = store.config();
        static thread_local std::vector<double> w;
        decay_weights(cfg.rho, cfg.dt, upto_steps, w);
        const Moments mo = segment_moments(observed.performance.data(), upto_steps);
        const double norm =
            1.0 / (2.0 * static_cast<double>(upto_steps) * cfg.sigma_k * cfg.sigma_k);
        double maxk = 0.0;
        for (std::size_t h = 0; h < H; ++h) {
            const double* ph = store.episode(h).performance.data();
            const Moments mh = segment_moments(ph, upto_steps);
            const double dist = K.weighted_pair_sqdist(
                observed.performance.data(), ph, w.data(), upto_steps, mo.mean,
                mo.inv_std, mh.mean, mh.inv_std);
            est.weights[h] = std::exp(-dist * norm);
            maxk = std::max(maxk, est.weights[h]);
        }
        if (maxk < 1e-300) {
            // All similarities numerically vanished; fall back to uniform.
            std::fill(est.weights.begin(), est.weights.end(),
                      1.0 / static_cast<double>(H));
        } else {
            const double total = K.sum(est.weights.data(), H);
            for (double& v : est.weights) v /= total;
        }
    }

    double p = 0.0;
    double lo = store.episode(0).final_performance();
    double hi = lo;
    double wsum = 0.0;
    for (std::size_t h = 0; h < H; ++h) {
        const double fin = store.episode(h).final_performance();
        const double wgt = est.weights[h];
        if (!(wgt >= 0.0 && wgt <= 1.0 + 1e-12))
            throw NumericalError("estimator weight escaped [0, 1]");
        p += wgt * fin;
        wsum += wgt;
        lo = std::min(lo, fin);
        hi = std::max(hi, fin);
    }
    if (std::fabs(wsum - 1.0) > 1e-12)
        throw NumericalError("estimator weights do not sum to one");
    const double slack = 1e-9 * std::max(1.0, hi - lo);
    if (p < lo - slack || p > hi + slack)
        throw NumericalError("estimate escaped the convex hull of stored finals");
    est.p_final = std::clamp(p, lo, hi);
    return est;
}

void MemoryStore::save(const std::filesystem::path& path) const {
    std::ofstream f(path);
    if (!f) throw Error("MemoryStore: cannot open " + path.string() + " for writing");
    f << "lrsched-memory v1\n";
    const std::size_t len = episodes_.empty() ? 0 : episodes_.front().size();
    f << std::setprecision(17) << "dt " << cfg_.dt << " len " << len << " count "
      << episodes_.size() << "\n";
    for (const auto& ep : episodes_) {
        for (std::size_t i = 0; i < ep.size(); ++i) {
            if (i) f << ' ';
            f << ep.performance[i];
        }
        f << '\n';
    }
    if (!f) throw Error("MemoryStore: write failed for " + path.string());
}

MemoryStore MemoryStore::load(const std::filesystem::path& path,
                              EstimatorConfig cfg) {
    std::ifstream f(path);
    if (!f) throw FormatError("MemoryStore: cannot open " + path.string());
    std::string line;
    if (!std::getline(f, line) || line != "lrsched-memory v1")
        throw FormatError("MemoryStore: bad magic line in " + path.string());
    std::string key_dt, key_len, key_count;
    double dt = 0.0;
    std::size_t len = 0, count = 0;
    f >> key_dt >> dt >> key_len >> len >> key_count >> count;
    if (key_dt != "dt" || key_len != "len" || key_count != "count" || !f)
        throw FormatError("MemoryStore: bad header in " + path.string());
    cfg.dt = dt;
    MemoryStore store(std::move(cfg));
    for (std::size_t h = 0; h < count; ++h) {
        Trajectory t;
        t.dt = dt;
        t.performance.resize(len);
        for (std::size_t i = 0; i < len; ++i)
            if (!(f >> t.performance[i]))
                throw FormatError("MemoryStore: truncated row " + std::to_string(h));
        store.commit(std::move(t));
    }
    return store;
}

}  // namespace lrsched
