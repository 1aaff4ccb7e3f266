#include <cmath>

#include "specsim/awc/kernels.hpp"

namespace specsim::kernels {

namespace {

void matvec_scalar(const double* w, const double* x, const double* bias, double* y, int rows,
                   int cols) {
    for (int r = 0; r < rows; ++r) {
        double acc = bias ? bias[r] : 0.0;
        const double* row = w + static_cast<std::size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
}

void matvec_t_scalar(const double* w, const double* gy, double* gx, int rows, int cols) {
    for (int c = 0; c < cols; ++c) gx[c] = 0.0;
    for (int r = 0; r < rows; ++r) {
        const double* row = w + static_cast<std::size_t>(r) * cols;
        const double g = gy[r];
        for (int c = 0; c < cols; ++c) gx[c] += row[c] * g;
    }
}

void ger_acc_scalar(double* gw, const double* gy, const double* x, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        double* row = gw + static_cast<std::size_t>(r) * cols;
        const double g = gy[r];
        for (int c = 0; c < cols; ++c) row[c] += g * x[c];
    }
}

void axpy_scalar(double a, const double* x, double* y, int n) {
    for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

double sum_abs_scalar(const double* x, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::fabs(x[i]);
    return acc;
}

void adamw_scalar(double* w, double* m, double* v, const double* g, int n, const AdamWParams& p,
                  double bias1, double bias2) {
    for (int i = 0; i < n; ++i) {
        m[i] = p.beta1 * m[i] + (1.0 - p.beta1) * g[i];
        v[i] = p.beta2 * v[i] + (1.0 - p.beta2) * g[i] * g[i];
        double mhat = m[i] / bias1;
        double vhat = v[i] / bias2;
        w[i] -= p.lr * (mhat / (std::sqrt(vhat) + p.eps) + p.weight_decay * w[i]);
    }
}

}  // namespace

const Backend& scalar_backend() {
    static const Backend b{"scalar",     matvec_scalar, matvec_t_scalar, ger_acc_scalar,
                           axpy_scalar,  sum_abs_scalar, adamw_scalar};
    return b;
}

void silu(const double* x, double* y, int n) {
    for (int i = 0; i < n; ++i) {
        double s = 1.0 / (1.0 + std::exp(-x[i]));
        y[i] = x[i] * s;
    }
}

void silu_backward(const double* x, const double* gy, double* gx, int n) {
    for (int i = 0; i < n; ++i) {
        double s = 1.0 / (1.0 + std::exp(-x[i]));
        gx[i] = gy[i] * (s * (1.0 + x[i] * (1.0 - s)));
    }
}

}  // namespace specsim::kernels
