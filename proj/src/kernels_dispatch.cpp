#include <atomic>
#include <cstdlib>
#include <string_view>

#include "lrsched/kernels.hpp"

namespace lrsched::kern {

#ifdef LRSCHED_WITH_AVX2
const Ops* avx2_table();  // defined in kernels_avx2.cpp
#endif

namespace {

const Ops* detect_avx2() {
#ifdef LRSCHED_WITH_AVX2
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return avx2_table();
#endif
    return nullptr;
}

std::atomic<const Ops*> g_active{nullptr};

const Ops* initial_table() {
    const char* env = std::getenv("LRSCHED_KERNELS");
    if (env && std::string_view(env) == "scalar") return &scalar_ops();
    const Ops* v = detect_avx2();
    if (env && std::string_view(env) == "avx2" && !v) return &scalar_ops();
    return v ? v : &scalar_ops();
}

}  // namespace

const Ops& ops() {
    const Ops* p = g_active.load(std::memory_order_acquire);
    if (!p) {
        p = initial_table();
        g_active.store(p, std::memory_order_release);
    }
    return *p;
}

const Ops* avx2_ops() { return detect_avx2(); }

std::string_view backend() {
    return &ops() == avx2_ops() ? "avx2" : "scalar";
}

bool set_backend(std::string_view name) {
    if (name == "scalar") {
        g_active.store(&scalar_ops(), std::memory_order_release);
        return true;
    }
    if (name == "avx2") {
        const Ops* v = detect_avx2();
        if (!v) return false;
        g_active.store(v, std::memory_order_release);
        return true;
    }
    return false;
}

}  // namespace lrsched::kern
