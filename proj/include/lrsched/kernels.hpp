#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the dynamics, estimator and meta-optimizer.
// Every operation has a scalar reference implementation and, on x86-64 with
// AVX2+FMA, a vectorized variant. The active table is chosen once at startup
// (override with LRSCHED_KERNELS=scalar|avx2); both tables stay reachable so
// tests can check scalar/SIMD equivalence directly.
namespace lrsched::kern {

struct Ops {
    // Reductions.
    double (*sum)(const double* a, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum of (a[i] - mean)^2
    double (*sumsqdiff)(const double* a, std::size_t n, double mean);
    // sum of w[i] * ((po[i]-mo)*iso - (ph[i]-mh)*ish)^2
    double (*weighted_pair_sqdist)(const double* po, const double* ph,
                                   const double* w, std::size_t n, double mo,
                                   double iso, double mh, double ish);

    // Vector updates / element maps.
    void (*axpy)(double a, const double* x, double* y, std::size_t n);  // y += a*x
    void (*vmul)(const double* a, const double* b, double* y, std::size_t n);  // y = a.*b
    void (*vexp)(const double* x, double* y, std::size_t n);
    void (*vtanh)(const double* x, double* y, std::size_t n);
    void (*vsigmoid)(const double* x, double* y, std::size_t n);
    void (*vsoftplus)(const double* x, double* y, std::size_t n);
    // y = g .* (1 - a.^2), a = tanh(z); aliasing y==g allowed.
    void (*vtanh_bwd)(const double* g, const double* a, double* y, std::size_t n);
    // y += g .* (-2a(1-a^2)) .* rz   (tanh curvature term)
    void (*vtanh_curv_acc)(const double* g, const double* a, const double* rz,
                           double* y, std::size_t n);
    // y += g .* s(1-s) .* rz        (softplus curvature term, s = sigmoid(z))
    void (*vsig_curv_acc)(const double* g, const double* s, const double* rz,
                          double* y, std::size_t n);

    // Dense matrix ops, row-major, accumulate into C.
    // C(m x n) += A(m x k) * B(k x n)
    void (*matmul_nn)(const double* a, const double* b, double* c, std::size_t m,
                      std::size_t k, std::size_t n);
    // C(m x n) += A^T * B with A stored (k x m)
    void (*matmul_tn)(const double* a, const double* b, double* c, std::size_t m,
                      std::size_t k, std::size_t n);
    // A(m x n): A[i,:] += row
    void (*addrow)(const double* row, double* a, std::size_t m, std::size_t n);
    // out[j] += sum_i A[i,j]
    void (*colsum_acc)(const double* a, std::size_t m, std::size_t n, double* out);
};

// Active table (AVX2 when available, scalar otherwise).
const Ops& ops();
// Reference table, always available.
const Ops& scalar_ops();
// AVX2 table or nullptr when the CPU/build lacks it.
const Ops* avx2_ops();

std::string_view backend();               // "avx2" | "scalar"
bool set_backend(std::string_view name);  // test hook; false if unavailable

}  // namespace lrsched::kern
