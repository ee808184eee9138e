#pragma once

#include "reassembly/kernels.hpp"

namespace reassembly::kernels::detail {

void one_minus_scalar(const double* in, double* out, std::size_t n);
void neg_log_clamped_scalar(const double* in, double* out, std::size_t n, double epsilon);
void lerp_scalar(const float* a, const float* b, float t, float* out, std::size_t n);
ByteMoments byte_moments_scalar(const std::uint8_t* data, std::size_t n);

#if defined(REASSEMBLY_HAVE_AVX2)
void one_minus_avx2(const double* in, double* out, std::size_t n);
void lerp_avx2(const float* a, const float* b, float t, float* out, std::size_t n);
ByteMoments byte_moments_avx2(const std::uint8_t* data, std::size_t n);
#endif

}  // namespace reassembly::kernels::detail
