#include <cstdlib>
#include <mutex>
#include <string>

#include "rankone/simd/kernels.hpp"

namespace rankone::simd {

#if defined(RANKONE_HAVE_AVX2)
const KernelTable* avx2_kernels_impl();
#endif

const KernelTable* avx2_kernels() {
#if defined(RANKONE_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? avx2_kernels_impl() : nullptr;
#else
    return nullptr;
#endif
}

namespace {

const KernelTable* by_name(std::string_view name) {
    if (name == "scalar") return &scalar_kernels();
    if (name == "avx2") return avx2_kernels();
    if (name == "auto" || name.empty()) {
        if (const auto* t = avx2_kernels()) return t;
        return &scalar_kernels();
    }
    return nullptr;
}

std::mutex g_mutex;
const KernelTable* g_active = nullptr;

}  // namespace

const KernelTable& active_kernels() {
    std::lock_guard lock(g_mutex);
    if (g_active == nullptr) {
        const char* env = std::getenv("RANKONE_SIMD");
        g_active = by_name(env ? env : "auto");
        if (g_active == nullptr) g_active = by_name("auto");
    }
    return *g_active;
}

bool select_kernels(std::string_view name) {
    const KernelTable* t = by_name(name);
    if (t == nullptr) return false;
    std::lock_guard lock(g_mutex);
    g_active = t;
    return true;
}

}  // namespace rankone::simd
