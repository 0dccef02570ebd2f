// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma and must only be *executed* after the runtime CPU check in
// kernels_dispatch.cpp. Building the table itself executes no vector code.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>

#include "lrsched/kernels.hpp"

namespace lrsched::kern {
namespace avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_hadd_pd(lo, lo));
}

// exp(x) for 4 doubles. Cody-Waite reduction, degree-13 Taylor polynomial,
// 2^k scaling through the exponent bits. Results below exp(-708) flush to 0.
inline __m256d exp4(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);

    __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
    r = _mm256_fnmadd_pd(k, ln2_lo, r);

    // Horner over 1/11! .. 1/0!; |r| <= ln2/2 keeps the remainder near 6e-15.
    __m256d p = _mm256_set1_pd(2.5052108385441718775e-08);
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985890653e-07));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985892510e-06));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.4801587301587301566e-05));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.9841269841269841253e-04));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.3888888888888889419e-03));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(8.3333333333333332177e-03));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(4.1666666666666664354e-02));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.6666666666666665741e-01));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(5.0e-01));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

    __m128i ki = _mm256_cvtpd_epi32(k);
    __m256i k64 = _mm256_cvtepi32_epi64(ki);
    __m256i ebits =
        _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
    __m256d res = _mm256_mul_pd(p, _mm256_castsi256_pd(ebits));

    const __m256d lo_cut = _mm256_set1_pd(-708.0);
    const __m256d hi_cut = _mm256_set1_pd(709.0);
    res = _mm256_blendv_pd(res, _mm256_setzero_pd(),
                           _mm256_cmp_pd(x, lo_cut, _CMP_LT_OQ));
    res = _mm256_blendv_pd(
        res, _mm256_set1_pd(std::numeric_limits<double>::infinity()),
        _mm256_cmp_pd(x, hi_cut, _CMP_GT_OQ));
    // propagate NaN inputs
    res = _mm256_blendv_pd(res, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
    return res;
}

const __m256d kSignMask = _mm256_set1_pd(-0.0);

inline __m256d abs4(__m256d x) { return _mm256_andnot_pd(kSignMask, x); }

// log1p(u) for u in (0, 1] via 2*atanh(u/(2+u)), even polynomial in z^2.
inline __m256d log1p_unit4(__m256d u) {
    const __m256d two = _mm256_set1_pd(2.0);
    __m256d z = _mm256_div_pd(u, _mm256_add_pd(two, u));
    __m256d w = _mm256_mul_pd(z, z);
    __m256d q = _mm256_set1_pd(1.0 / 31.0);
    q = _mm256_fmadd_pd(q, w, _mm256_set1_pd(1.0 / 29.0));
    q = _mm256_fmadd_pd(q, w, _mm256_set1_pd(1.0 / 27.0));
    q = _mm256_fmadd_pd(q, w, _mm256_set1_pd(1.0 / 25.0));
    q = _mm256_fmadd_pd(q, w, _mm256_set1_pd(1.0 / 23.0));
    q = _mm256_fmadd_pd(q, w, _mm256_set1_pd(1.0 / 21.0));
    q = _mm256_fmadd_pd(q, w, _mm256_set1_pd(1.0 / 19.0));
    q = _mm256_fmadd_pd(q, w, _mm256_set1_pd(1.0 / 17.0));
    q = _mm256_fmadd_pd(q, w, _mm256_set1_pd(1.0 / 15.0));
    q = _mm256_fmadd_pd(q, w, _mm256_set1_pd(1.0 / 13.0));
    q = _mm256_fmadd_pd(q, w, _mm256_set1_pd(1.0 / 11.0));
    q = _mm256_fmadd_pd(q, w, _mm256_set1_pd(1.0 / 9.0));
    q = _mm256_fmadd_pd(q, w, _mm256_set1_pd(1.0 / 7.0));
    q = _mm256_fmadd_pd(q, w, _mm256_set1_pd(1.0 / 5.0));
    q = _mm256_fmadd_pd(q, w, _mm256_set1_pd(1.0 / 3.0));
    q = _mm256_fmadd_pd(q, w, _mm256_set1_pd(1.0));
    return _mm256_mul_pd(_mm256_add_pd(z, z), q);
}

}  // namespace

double sum(const double* a, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_add_pd(s0, _mm256_loadu_pd(a + i));
        s1 = _mm256_add_pd(s1, _mm256_loadu_pd(a + i + 4));
    }
    for (; i + 4 <= n; i += 4) s0 = _mm256_add_pd(s0, _mm256_loadu_pd(a + i));
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) s += a[i];
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4),
                             s1);
    }
    for (; i + 4 <= n; i += 4)
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sumsqdiff(const double* a, std::size_t n, double mean) {
    const __m256d m = _mm256_set1_pd(mean);
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), m);
        __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), m);
        s0 = _mm256_fmadd_pd(d0, d0, s0);
        s1 = _mm256_fmadd_pd(d1, d1, s1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), m);
        s0 = _mm256_fmadd_pd(d0, d0, s0);
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) {
        const double d = a[i] - mean;
        s += d * d;
    }
    return s;
}

double weighted_pair_sqdist(const double* po, const double* ph, const double* w,
                            std::size_t n, double mo, double iso, double mh,
                            double ish) {
    const __m256d vmo = _mm256_set1_pd(mo), viso = _mm256_set1_pd(iso);
    const __m256d vmh = _mm256_set1_pd(mh), vish = _mm256_set1_pd(ish);
    __m256d s = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d zo = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(po + i), vmo), viso);
        __m256d zh = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(ph + i), vmh), vish);
        __m256d d = _mm256_sub_pd(zo, zh);
        s = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), d), d, s);
    }
    double acc = hsum(s);
    for (; i < n; ++i) {
        const double d = (po[i] - mo) * iso - (ph[i] - mh) * ish;
        acc += w[i] * d * d;
    }
    return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, r);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void vmul(const double* a, const double* b, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) y[i] = a[i] * b[i];
}

void vexp(const double* x, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, exp4(_mm256_loadu_pd(x + i)));
    if (i < n) {
        double buf[4] = {0, 0, 0, 0};
        for (std::size_t j = i; j < n; ++j) buf[j - i] = x[j];
        alignas(32) double out[4];
        _mm256_store_pd(out, exp4(_mm256_loadu_pd(buf)));
        for (std::size_t j = i; j < n; ++j) y[j] = out[j - i];
    }
}

void vtanh(const double* x, double* y, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d mtwo = _mm256_set1_pd(-2.0);
    std::size_t i = 0;
    auto block = [&](__m256d vx) {
        __m256d ax = abs4(vx);
        __m256d e = exp4(_mm256_mul_pd(mtwo, ax));
        __m256d t = _mm256_div_pd(_mm256_sub_pd(one, e), _mm256_add_pd(one, e));
        return _mm256_or_pd(t, _mm256_and_pd(vx, kSignMask));
    };
    // Two blocks in flight hide the polynomial's latency chain.
    for (; i + 8 <= n; i += 8) {
        const __m256d r0 = block(_mm256_loadu_pd(x + i));
        const __m256d r1 = block(_mm256_loadu_pd(x + i + 4));
        _mm256_storeu_pd(y + i, r0);
        _mm256_storeu_pd(y + i + 4, r1);
    }
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, block(_mm256_loadu_pd(x + i)));
    if (i < n) {
        double buf[4] = {0, 0, 0, 0};
        for (std::size_t j = i; j < n; ++j) buf[j - i] = x[j];
        alignas(32) double out[4];
        _mm256_store_pd(out, block(_mm256_loadu_pd(buf)));
        for (std::size_t j = i; j < n; ++j) y[j] = out[j - i];
    }
}

void vsigmoid(const double* x, double* y, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    auto block = [&](__m256d vx) {
        __m256d ax = abs4(vx);
        __m256d e = exp4(_mm256_sub_pd(_mm256_setzero_pd(), ax));
        __m256d den = _mm256_add_pd(one, e);
        __m256d pos = _mm256_div_pd(one, den);
        __m256d neg = _mm256_div_pd(e, den);
        __m256d isneg = _mm256_cmp_pd(vx, _mm256_setzero_pd(), _CMP_LT_OQ);
        return _mm256_blendv_pd(pos, neg, isneg);
    };
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, block(_mm256_loadu_pd(x + i)));
    if (i < n) {
        double buf[4] = {0, 0, 0, 0};
        for (std::size_t j = i; j < n; ++j) buf[j - i] = x[j];
        alignas(32) double out[4];
        _mm256_store_pd(out, block(_mm256_loadu_pd(buf)));
        for (std::size_t j = i; j < n; ++j) y[j] = out[j - i];
    }
}

void vsoftplus(const double* x, double* y, std::size_t n) {
    std::size_t i = 0;
    auto block = [&](__m256d vx) {
        __m256d ax = abs4(vx);
        __m256d e = exp4(_mm256_sub_pd(_mm256_setzero_pd(), ax));
        __m256d lp = log1p_unit4(e);
        __m256d relu = _mm256_max_pd(vx, _mm256_setzero_pd());
        return _mm256_add_pd(relu, lp);
    };
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, block(_mm256_loadu_pd(x + i)));
    if (i < n) {
        double buf[4] = {0, 0, 0, 0};
        for (std::size_t j = i; j < n; ++j) buf[j - i] = x[j];
        alignas(32) double out[4];
        _mm256_store_pd(out, block(_mm256_loadu_pd(buf)));
        for (std::size_t j = i; j < n; ++j) y[j] = out[j - i];
    }
}

void vtanh_bwd(const double* g, const double* a, double* y, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d der = _mm256_fnmadd_pd(va, va, one);
        _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(g + i), der));
    }
    for (; i < n; ++i) y[i] = g[i] * (1.0 - a[i] * a[i]);
}

void vtanh_curv_acc(const double* g, const double* a, const double* rz, double* y,
                    std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d mtwo = _mm256_set1_pd(-2.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d der = _mm256_fnmadd_pd(va, va, one);
        __m256d curv = _mm256_mul_pd(_mm256_mul_pd(mtwo, va), der);
        __m256d t = _mm256_mul_pd(_mm256_loadu_pd(g + i), curv);
        __m256d r = _mm256_fmadd_pd(t, _mm256_loadu_pd(rz + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, r);
    }
    for (; i < n; ++i)
        y[i] += g[i] * (-2.0 * a[i] * (1.0 - a[i] * a[i])) * rz[i];
}

void vsig_curv_acc(const double* g, const double* s, const double* rz, double* y,
                   std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vs = _mm256_loadu_pd(s + i);
        __m256d curv = _mm256_mul_pd(vs, _mm256_sub_pd(one, vs));
        __m256d t = _mm256_mul_pd(_mm256_loadu_pd(g + i), curv);
        __m256d r = _mm256_fmadd_pd(t, _mm256_loadu_pd(rz + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, r);
    }
    for (; i < n; ++i) y[i] += g[i] * (s[i] * (1.0 - s[i])) * rz[i];
}

namespace {

// Shared j-vectorized core for the two matmul layouts. astep is the distance
// between A elements consumed by consecutive kk for a fixed output row i.
inline void matmul_rowcore(const double* abase, std::size_t astep, const double* b,
                           double* crow, std::size_t k, std::size_t n) {
    std::size_t j = 0;
    for (; j + 16 <= n; j += 16) {
        __m256d c0 = _mm256_loadu_pd(crow + j);
        __m256d c1 = _mm256_loadu_pd(crow + j + 4);
        __m256d c2 = _mm256_loadu_pd(crow + j + 8);
        __m256d c3 = _mm256_loadu_pd(crow + j + 12);
        const double* ap = abase;
        for (std::size_t kk = 0; kk < k; ++kk, ap += astep) {
            const __m256d av = _mm256_set1_pd(*ap);
            const double* brow = b + kk * n + j;
            c0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow), c0);
            c1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + 4), c1);
            c2 = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + 8), c2);
            c3 = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + 12), c3);
        }
        _mm256_storeu_pd(crow + j, c0);
        _mm256_storeu_pd(crow + j + 4, c1);
        _mm256_storeu_pd(crow + j + 8, c2);
        _mm256_storeu_pd(crow + j + 12, c3);
    }
    for (; j + 4 <= n; j += 4) {
        __m256d c0 = _mm256_loadu_pd(crow + j);
        const double* ap = abase;
        for (std::size_t kk = 0; kk < k; ++kk, ap += astep)
            c0 = _mm256_fmadd_pd(_mm256_set1_pd(*ap), _mm256_loadu_pd(b + kk * n + j),
                                 c0);
        _mm256_storeu_pd(crow + j, c0);
    }
    for (; j + 2 <= n; j += 2) {
        __m128d c0 = _mm_loadu_pd(crow + j);
        const double* ap = abase;
        for (std::size_t kk = 0; kk < k; ++kk, ap += astep)
            c0 = _mm_fmadd_pd(_mm_set1_pd(*ap), _mm_loadu_pd(b + kk * n + j), c0);
        _mm_storeu_pd(crow + j, c0);
    }
    for (; j < n; ++j) {
        double s = crow[j];
        const double* ap = abase;
        for (std::size_t kk = 0; kk < k; ++kk, ap += astep) s += *ap * b[kk * n + j];
        crow[j] = s;
    }
}

}  // namespace

void matmul_nn(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i)
        matmul_rowcore(a + i * k, 1, b, c + i * n, k, n);
}

namespace {

inline __m256i tail_mask(std::size_t lanes) {
    alignas(32) std::int64_t bits[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < lanes; ++i) bits[i] = -1;
    return _mm256_load_si256(reinterpret_cast<const __m256i*>(bits));
}

// Register-tiled A^T * B accumulation for narrow outputs (n <= 8): the C tile
// stays in registers across the whole kk sweep. IB/NB are compile-time so the
// accumulator array promotes to registers.
template <int IB, int NB>
void tn_tile(const double* a, const double* b, double* c, std::size_t it,
             std::size_t m, std::size_t k, std::size_t n, __m256i m0, __m256i m1,
             __m256i m2) {
    const __m256i masks[3] = {m0, m1, m2};
    __m256d acc[IB][NB];
    for (int i = 0; i < IB; ++i)
        for (int bb = 0; bb < NB; ++bb)
            acc[i][bb] = _mm256_maskload_pd(c + (it + i) * n + 4 * bb, masks[bb]);
    for (std::size_t kk = 0; kk < k; ++kk) {
        const double* arow = a + kk * m + it;
        __m256d br[NB];
        for (int bb = 0; bb < NB; ++bb)
            br[bb] = _mm256_maskload_pd(b + kk * n + 4 * bb, masks[bb]);
        for (int i = 0; i < IB; ++i) {
            const __m256d av = _mm256_set1_pd(arow[i]);
            for (int bb = 0; bb < NB; ++bb)
                acc[i][bb] = _mm256_fmadd_pd(av, br[bb], acc[i][bb]);
        }
    }
    for (int i = 0; i < IB; ++i)
        for (int bb = 0; bb < NB; ++bb)
            _mm256_maskstore_pd(c + (it + i) * n + 4 * bb, masks[bb], acc[i][bb]);
}

using TnTileFn = void (*)(const double*, const double*, double*, std::size_t,
                          std::size_t, std::size_t, std::size_t, __m256i, __m256i,
                          __m256i);

template <int NB>
constexpr TnTileFn tn_tiles[4] = {tn_tile<1, NB>, tn_tile<2, NB>, tn_tile<3, NB>,
                                  tn_tile<4, NB>};

}  // namespace

void matmul_tn(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n) {
    // dW = X^T * delta shape: tall k, narrow n. Masked loads keep the tile
    // loop branch-free for any n <= 12; wider outputs take the per-row core.
    if (n <= 12) {
        const __m256i m0 = tail_mask(std::min<std::size_t>(4, n));
        const __m256i m1 =
            n > 4 ? tail_mask(std::min<std::size_t>(4, n - 4)) : tail_mask(0);
        const __m256i m2 = n > 8 ? tail_mask(n - 8) : tail_mask(0);
        const int nb = n > 8 ? 3 : (n > 4 ? 2 : 1);
        // 3-block tiles need 2-row strips to stay within 16 ymm registers.
        const std::size_t istep = nb == 3 ? 2 : 4;
        std::size_t it = 0;
        while (it < m) {
            const int ib = static_cast<int>(std::min(istep, m - it));
            switch (nb) {
                case 1: tn_tiles<1>[ib - 1](a, b, c, it, m, k, n, m0, m1, m2); break;
                case 2: tn_tiles<2>[ib - 1](a, b, c, it, m, k, n, m0, m1, m2); break;
                default: tn_tiles<3>[ib - 1](a, b, c, it, m, k, n, m0, m1, m2); break;
            }
            it += static_cast<std::size_t>(ib);
        }
        return;
    }
    for (std::size_t i = 0; i < m; ++i)
        matmul_rowcore(a + i, m, b, c + i * n, k, n);
}

void addrow(const double* row, double* a, std::size_t m, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        double* arow = a + i * n;
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4)
            _mm256_storeu_pd(
                arow + j,
                _mm256_add_pd(_mm256_loadu_pd(arow + j), _mm256_loadu_pd(row + j)));
        for (; j < n; ++j) arow[j] += row[j];
    }
}

void colsum_acc(const double* a, std::size_t m, std::size_t n, double* out) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * n;
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4)
            _mm256_storeu_pd(
                out + j,
                _mm256_add_pd(_mm256_loadu_pd(out + j), _mm256_loadu_pd(arow + j)));
        for (; j < n; ++j) out[j] += arow[j];
    }
}

}  // namespace avx2

const Ops* avx2_table() {
    static const Ops table = {
        avx2::sum,
        avx2::dot,
        avx2::sumsqdiff,
        avx2::weighted_pair_sqdist,
        avx2::axpy,
        avx2::vmul,
        avx2::vexp,
        avx2::vtanh,
        avx2::vsigmoid,
        avx2::vsoftplus,
        avx2::vtanh_bwd,
        avx2::vtanh_curv_acc,
        avx2::vsig_curv_acc,
        avx2::matmul_nn,
        avx2::matmul_tn,
        avx2::addrow,
        avx2::colsum_acc,
    };
    return &table;
}

}  // namespace lrsched::kern

#endif  // x86-64
