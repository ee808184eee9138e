// Compiled with -mavx2. Only reached through avx2_table() after a CPU check.

#include "kernels_impl.hpp"

#include <immintrin.h>

namespace reassembly::kernels::detail {

void one_minus_avx2(const double* in, double* out, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        _mm256_storeu_pd(out + k, _mm256_sub_pd(one, _mm256_loadu_pd(in + k)));
    }
    for (; k < n; ++k) out[k] = 1.0 - in[k];
}

void lerp_avx2(const float* a, const float* b, float t, float* out, std::size_t n) {
    const __m256 vt = _mm256_set1_ps(t);
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8) {
        const __m256 va = _mm256_loadu_ps(a + k);
        const __m256 vb = _mm256_loadu_ps(b + k);
        // mul then add, never fused, to match the scalar rounding
        _mm256_storeu_ps(out + k, _mm256_add_ps(va, _mm256_mul_ps(vt, _mm256_sub_ps(vb, va))));
    }
    for (; k < n; ++k) out[k] = a[k] + t * (b[k] - a[k]);
}

ByteMoments byte_moments_avx2(const std::uint8_t* data, std::size_t n) {
    const __m256i zero = _mm256_setzero_si256();
    __m256i sum = _mm256_setzero_si256();     // 4 x u64
    __m256i sum_sq = _mm256_setzero_si256();  // 4 x u64
    std::size_t k = 0;
    for (; k + 32 <= n; k += 32) {
        const __m256i bytes = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + k));
        sum = _mm256_add_epi64(sum, _mm256_sad_epu8(bytes, zero));

        const __m256i lo = _mm256_cvtepu8_epi16(_mm256_castsi256_si128(bytes));
        const __m256i hi = _mm256_cvtepu8_epi16(_mm256_extracti128_si256(bytes, 1));
        // each i32 lane holds at most 4 * 255^2, no overflow within one step
        const __m256i sq = _mm256_add_epi32(_mm256_madd_epi16(lo, lo), _mm256_madd_epi16(hi, hi));
        sum_sq = _mm256_add_epi64(sum_sq, _mm256_cvtepu32_epi64(_mm256_castsi256_si128(sq)));
        sum_sq = _mm256_add_epi64(sum_sq, _mm256_cvtepu32_epi64(_mm256_extracti128_si256(sq, 1)));
    }
    alignas(32) std::uint64_t lanes[4];
    ByteMoments m;
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), sum);
    m.sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), sum_sq);
    m.sum_sq = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; k < n; ++k) {
        const std::uint64_t v = data[k];
        m.sum += v;
        m.sum_sq += v * v;
    }
    return m;
}

}  // namespace reassembly::kernels::detail
