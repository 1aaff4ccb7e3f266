#pragma once

#include <cstddef>
#include <string>

namespace specsim::kernels {

struct AdamWParams {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 1e-2;
};

// Double-precision primitives behind the WC-DNN forward/backward/optimizer
// paths. A backend is a table of function pointers; the active one is picked
// once at runtime from CPU features. Scalar is the reference; vector
// backends must agree with it to tight tolerance (bitwise for elementwise
// ops, ~1e-12 relative where sums are reassociated).
struct Backend {
    const char* name;

    // y = W x + bias, W row-major [rows x cols]; bias may be null
    void (*matvec)(const double* w, const double* x, const double* bias, double* y, int rows,
                   int cols);
    // gx = W^T gy (accumulates into zeroed gx)
    void (*matvec_t)(const double* w, const double* gy, double* gx, int rows, int cols);
    // gw += gy * x^T
    void (*ger_acc)(double* gw, const double* gy, const double* x, int rows, int cols);
    // y += a * x
    void (*axpy)(double a, const double* x, double* y, int n);
    double (*sum_abs)(const double* x, int n);
    // decoupled-weight-decay Adam step; bias1/bias2 are the 1-beta^t terms
    void (*adamw_update)(double* w, double* m, double* v, const double* g, int n,
                         const AdamWParams& p, double bias1, double bias2);
};

const Backend& scalar_backend();
bool avx2_supported();

// Selected once (AVX2 when the CPU has it, otherwise scalar) and cached.
const Backend& active_backend();

// Test hook: "scalar", "avx2" or "" for auto. Throws ConfigError when the
// requested backend is not available on this machine.
void force_backend(const std::string& name);
std::string active_backend_name();

// SiLU x*sigmoid(x) and its derivative. Shared scalar path in every backend
// so exp() comes from the same libm code on both sides of an equivalence
// test; the matvec/outer-product kernels dominate runtime anyway.
void silu(const double* x, double* y, int n);
void silu_backward(const double* x, const double* gy, double* gx, int n);

}  // namespace specsim::kernels
