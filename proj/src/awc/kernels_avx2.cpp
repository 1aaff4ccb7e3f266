// AVX2 variants of the WC-DNN kernels. Compiled with -mavx2 in its own
// translation unit; only reachable through the runtime dispatch when the
// CPU reports AVX2.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

#include "specsim/awc/kernels.hpp"

namespace specsim::kernels {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

void matvec_avx2(const double* w, const double* x, const double* bias, double* y, int rows,
                 int cols) {
    const int tail = cols & ~3;
    for (int r = 0; r < rows; ++r) {
        const double* row = w + static_cast<std::size_t>(r) * cols;
        __m256d acc = _mm256_setzero_pd();
        int c = 0;
        for (; c < tail; c += 4) {
            acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(row + c),
                                                   _mm256_loadu_pd(x + c)));
        }
        double s = hsum(acc);
        for (; c < cols; ++c) s += row[c] * x[c];
        y[r] = (bias ? bias[r] : 0.0) + s;
    }
}

void matvec_t_avx2(const double* w, const double* gy, double* gx, int rows, int cols) {
    const int tail = cols & ~3;
    int c = 0;
    for (; c < tail; c += 4) _mm256_storeu_pd(gx + c, _mm256_setzero_pd());
    for (; c < cols; ++c) gx[c] = 0.0;
    for (int r = 0; r < rows; ++r) {
        const double* row = w + static_cast<std::size_t>(r) * cols;
        const __m256d g = _mm256_set1_pd(gy[r]);
        c = 0;
        for (; c < tail; c += 4) {
            __m256d cur = _mm256_loadu_pd(gx + c);
            cur = _mm256_add_pd(cur, _mm256_mul_pd(_mm256_loadu_pd(row + c), g));
            _mm256_storeu_pd(gx + c, cur);
        }
        for (; c < cols; ++c) gx[c] += row[c] * gy[r];
    }
}

void ger_acc_avx2(double* gw, const double* gy, const double* x, int rows, int cols) {
    const int tail = cols & ~3;
    for (int r = 0; r < rows; ++r) {
        double* row = gw + static_cast<std::size_t>(r) * cols;
        const __m256d g = _mm256_set1_pd(gy[r]);
        int c = 0;
        for (; c < tail; c += 4) {
            __m256d cur = _mm256_loadu_pd(row + c);
            cur = _mm256_add_pd(cur, _mm256_mul_pd(g, _mm256_loadu_pd(x + c)));
            _mm256_storeu_pd(row + c, cur);
        }
        for (; c < cols; ++c) row[c] += gy[r] * x[c];
    }
}

void axpy_avx2(double a, const double* x, double* y, int n) {
    const __m256d va = _mm256_set1_pd(a);
    const int tail = n & ~3;
    int i = 0;
    for (; i < tail; i += 4) {
        __m256d cur = _mm256_loadu_pd(y + i);
        cur = _mm256_add_pd(cur, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, cur);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

double sum_abs_avx2(const double* x, int n) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    const int tail = n & ~3;
    int i = 0;
    for (; i < tail; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(x + i)));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += std::fabs(x[i]);
    return s;
}

void adamw_avx2(double* w, double* m, double* v, const double* g, int n, const AdamWParams& p,
                double bias1, double bias2) {
    const __m256d b1 = _mm256_set1_pd(p.beta1);
    const __m256d ob1 = _mm256_set1_pd(1.0 - p.beta1);
    const __m256d b2 = _mm256_set1_pd(p.beta2);
    const __m256d ob2 = _mm256_set1_pd(1.0 - p.beta2);
    const __m256d inv_bias1 = _mm256_set1_pd(bias1);
    const __m256d inv_bias2 = _mm256_set1_pd(bias2);
    const __m256d lr = _mm256_set1_pd(p.lr);
    const __m256d eps = _mm256_set1_pd(p.eps);
    const __m256d wd = _mm256_set1_pd(p.weight_decay);
    const int tail = n & ~3;
    int i = 0;
    for (; i < tail; i += 4) {
        __m256d gi = _mm256_loadu_pd(g + i);
        __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)),
                                   _mm256_mul_pd(ob1, gi));
        __m256d vi = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                   _mm256_mul_pd(ob2, _mm256_mul_pd(gi, gi)));
        _mm256_storeu_pd(m + i, mi);
        _mm256_storeu_pd(v + i, vi);
        __m256d mhat = _mm256_div_pd(mi, inv_bias1);
        __m256d vhat = _mm256_div_pd(vi, inv_bias2);
        __m256d step = _mm256_div_pd(mhat, _mm256_add_pd(_mm256_sqrt_pd(vhat), eps));
        __m256d wi = _mm256_loadu_pd(w + i);
        step = _mm256_add_pd(step, _mm256_mul_pd(wd, wi));
        _mm256_storeu_pd(w + i, _mm256_sub_pd(wi, _mm256_mul_pd(lr, step)));
    }
    for (; i < n; ++i) {
        m[i] = p.beta1 * m[i] + (1.0 - p.beta1) * g[i];
        v[i] = p.beta2 * v[i] + (1.0 - p.beta2) * g[i] * g[i];
        double mhat = m[i] / bias1;
        double vhat = v[i] / bias2;
        w[i] -= p.lr * (mhat / (std::sqrt(vhat) + p.eps) + p.weight_decay * w[i]);
    }
}

}  // namespace

const Backend& avx2_backend_impl() {
    static const Backend b{"avx2",    matvec_avx2, matvec_t_avx2, ger_acc_avx2,
                           axpy_avx2, sum_abs_avx2, adamw_avx2};
    return b;
}

}  // namespace specsim::kernels

#endif  // x86_64
