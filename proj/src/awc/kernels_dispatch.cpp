#include "specsim/awc/kernels.hpp"

#include "specsim/errors.hpp"

namespace specsim::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const Backend& avx2_backend_impl();
#endif

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

namespace {

const Backend* select_auto() {
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_supported()) return &avx2_backend_impl();
#endif
    return &scalar_backend();
}

const Backend*& active_slot() {
    static const Backend* active = select_auto();
    return active;
}

}  // namespace

const Backend& active_backend() { return *active_slot(); }

std::string active_backend_name() { return active_backend().name; }

void force_backend(const std::string& name) {
    if (name.empty() || name == "auto") {
        active_slot() = select_auto();
        return;
    }
    if (name == "scalar") {
        active_slot() = &scalar_backend();
        return;
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (name == "avx2") {
        if (!avx2_supported()) throw ConfigError("avx2 backend not supported on this CPU");
        active_slot() = &avx2_backend_impl();
        return;
    }
#endif
    throw ConfigError("unknown kernel backend '" + name + "'");
}

}  // namespace specsim::kernels
