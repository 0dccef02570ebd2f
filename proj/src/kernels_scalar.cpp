#include <cmath>
#include <cstddef>

#include "lrsched/kernels.hpp"

namespace lrsched::kern {
namespace scalar {

double sum(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sumsqdiff(const double* a, std::size_t n, double mean) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - mean;
        s += d * d;
    }
    return s;
}

double weighted_pair_sqdist(const double* po, const double* ph, const double* w,
                            std::size_t n, double mo, double iso, double mh,
                            double ish) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (po[i] - mo) * iso - (ph[i] - mh) * ish;
        s += w[i] * d * d;
    }
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void vmul(const double* a, const double* b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * b[i];
}

void vexp(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::exp(x[i]);
}

void vtanh(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
}

void vsigmoid(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = std::fabs(x[i]);
        const double e = std::exp(-t);
        const double s = 1.0 / (1.0 + e);
        y[i] = x[i] >= 0.0 ? s : 1.0 - s;
    }
}

void vsoftplus(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = std::fabs(x[i]);
        const double lp = std::log1p(std::exp(-t));
        y[i] = (x[i] > 0.0 ? x[i] : 0.0) + lp;
    }
}

void vtanh_bwd(const double* g, const double* a, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = g[i] * (1.0 - a[i] * a[i]);
}

void vtanh_curv_acc(const double* g, const double* a, const double* rz, double* y,
                    std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        y[i] += g[i] * (-2.0 * a[i] * (1.0 - a[i] * a[i])) * rz[i];
}

void vsig_curv_acc(const double* g, const double* s, const double* rz, double* y,
                   std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        y[i] += g[i] * (s[i] * (1.0 - s[i])) * rz[i];
}

void matmul_nn(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double av = arow[kk];
            const double* brow = b + kk * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void matmul_tn(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n) {
    for (std::size_t kk = 0; kk < k; ++kk) {
        const double* arow = a + kk * m;
        const double* brow = b + kk * n;
        for (std::size_t i = 0; i < m; ++i) {
            const double av = arow[i];
            double* crow = c + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void addrow(const double* row, double* a, std::size_t m, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        double* arow = a + i * n;
        for (std::size_t j = 0; j < n; ++j) arow[j] += row[j];
    }
}

void colsum_acc(const double* a, std::size_t m, std::size_t n, double* out) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * n;
        for (std::size_t j = 0; j < n; ++j) out[j] += arow[j];
    }
}

}  // namespace scalar

const Ops& scalar_ops() {
    static const Ops table = {
        scalar::sum,
        scalar::dot,
        scalar::sumsqdiff,
        scalar::weighted_pair_sqdist,
        scalar::axpy,
        scalar::vmul,
        scalar::vexp,
        scalar::vtanh,
        scalar::vsigmoid,
        scalar::vsoftplus,
        scalar::vtanh_bwd,
        scalar::vtanh_curv_acc,
        scalar::vsig_curv_acc,
        scalar::matmul_nn,
        scalar::matmul_tn,
        scalar::addrow,
        scalar::colsum_acc,
    };
    return table;
}

}  // namespace lrsched::kern
