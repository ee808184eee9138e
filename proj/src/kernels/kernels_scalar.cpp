#include "kernels_impl.hpp"

#include <algorithm>
#include <cmath>

namespace reassembly::kernels::detail {

void one_minus_scalar(const double* in, double* out, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) out[k] = 1.0 - in[k];
}

void neg_log_clamped_scalar(const double* in, double* out, std::size_t n, double epsilon) {
    for (std::size_t k = 0; k < n; ++k) out[k] = -std::log(std::max(in[k], epsilon));
}

void lerp_scalar(const float* a, const float* b, float t, float* out, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] + t * (b[k] - a[k]);
}

ByteMoments byte_moments_scalar(const std::uint8_t* data, std::size_t n) {
    ByteMoments m;
    for (std::size_t k = 0; k < n; ++k) {
        const std::uint64_t v = data[k];
        m.sum += v;
        m.sum_sq += v * v;
    }
    return m;
}

}  // namespace reassembly::kernels::detail
