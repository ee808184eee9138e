#pragma once

// Data-parallel inner loops used by the cost tables, the image resampler
// and the band statistics of the content scorer.
//
// Every kernel has a scalar reference. Vector variants are compiled into
// separate translation units and selected at runtime from the CPU
// features; they must produce bit-identical results to the scalar
// reference (integer kernels trivially, floating-point kernels because
// they perform the same operations in the same order per element).
// Set REASSEMBLY_SIMD=scalar in the environment to force the reference.

#include <cstddef>
#include <cstdint>
#include <span>

namespace reassembly::kernels {

struct ByteMoments {
    std::uint64_t sum = 0;
    std::uint64_t sum_sq = 0;

    friend bool operator==(const ByteMoments&, const ByteMoments&) = default;
};

struct KernelTable {
    const char* name;
    // out[k] = 1 - in[k]
    void (*one_minus)(const double* in, double* out, std::size_t n);
    // out[k] = -ln(max(in[k], epsilon))
    void (*neg_log_clamped)(const double* in, double* out, std::size_t n, double epsilon);
    // out[k] = a[k] + t * (b[k] - a[k])
    void (*lerp)(const float* a, const float* b, float t, float* out, std::size_t n);
    // Sum and sum of squares of n bytes.
    ByteMoments (*byte_moments)(const std::uint8_t* data, std::size_t n);
};

const KernelTable& scalar_table();

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_table();

/// The table in use for this process. Chosen once on first call.
const KernelTable& active();

void one_minus(std::span<const double> in, std::span<double> out);
void neg_log_clamped(std::span<const double> in, std::span<double> out, double epsilon);
void lerp(std::span<const float> a, std::span<const float> b, float t, std::span<float> out);
ByteMoments byte_moments(std::span<const std::uint8_t> data);

}  // namespace reassembly::kernels
