#include "kernels_impl.hpp"

#include <cassert>
#include <cstdlib>
#include <string_view>

namespace reassembly::kernels {

namespace {

constexpr KernelTable kScalar{
    "scalar",
    detail::one_minus_scalar,
    detail::neg_log_clamped_scalar,
    detail::lerp_scalar,
    detail::byte_moments_scalar,
};

#if defined(REASSEMBLY_HAVE_AVX2)
// No vector logarithm in AVX2; the log kernel stays on the reference path.
constexpr KernelTable kAvx2{
    "avx2",
    detail::one_minus_avx2,
    detail::neg_log_clamped_scalar,
    detail::lerp_avx2,
    detail::byte_moments_avx2,
};

bool cpu_has_avx2() {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
}
#endif

const KernelTable& select() {
    if (const char* env = std::getenv("REASSEMBLY_SIMD"); env && std::string_view(env) == "scalar") {
        return kScalar;
    }
    if (const KernelTable* t = avx2_table()) return *t;
    return kScalar;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(REASSEMBLY_HAVE_AVX2)
    static const bool supported = cpu_has_avx2();
    return supported ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() {
    static const KernelTable& table = select();
    return table;
}

void one_minus(std::span<const double> in, std::span<double> out) {
    assert(in.size() == out.size());
    active().one_minus(in.data(), out.data(), in.size());
}

void neg_log_clamped(std::span<const double> in, std::span<double> out, double epsilon) {
    assert(in.size() == out.size());
    active().neg_log_clamped(in.data(), out.data(), in.size(), epsilon);
}

void lerp(std::span<const float> a, std::span<const float> b, float t, std::span<float> out) {
    assert(a.size() == out.size() && b.size() == out.size());
    active().lerp(a.data(), b.data(), t, out.data(), out.size());
}

ByteMoments byte_moments(std::span<const std::uint8_t> data) {
    return active().byte_moments(data.data(), data.size());
}

}  // namespace reassembly::kernels
