#pragma once

// Projection kernels: the data-parallel inner loop of the sliced distance.
//
// Every variant computes out[s * n + i] = <point_i, direction_s> for a
// row-major n x d point block and a row-major k x d direction block. The
// reduction order used for one (point, direction) pair depends only on d,
// never on n, k or the pair's position, so projecting a point alone or as
// part of a larger block yields the same bits under a given variant.
// Variants differ from the scalar reference by rounding only.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace watch::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;
std::optional<Isa> parse_isa(std::string_view name) noexcept;

/// True when the variant is compiled in and the running CPU supports it.
bool isa_available(Isa isa) noexcept;

/// Variant used by project(). Chosen on first use: the WATCH_KERNEL
/// environment variable (scalar|avx2|neon) if set and available, else the
/// widest available variant.
Isa active_isa() noexcept;

/// Throws InvalidInput if the variant is unavailable.
void set_active_isa(Isa isa);

void project_scalar(const double* points, std::size_t n, std::size_t d,
                    const double* dirs, std::size_t k, double* out) noexcept;
#if defined(__x86_64__) || defined(_M_X64)
void project_avx2(const double* points, std::size_t n, std::size_t d,
                  const double* dirs, std::size_t k, double* out) noexcept;
#endif
#if defined(__aarch64__)
void project_neon(const double* points, std::size_t n, std::size_t d,
                  const double* dirs, std::size_t k, double* out) noexcept;
#endif

/// Projects with a specific variant. Sizes are checked; throws InvalidInput.
void project_with(Isa isa, std::span<const double> points, std::size_t d,
                  std::span<const double> dirs, std::span<double> out);

/// Projects with the active variant.
void project(std::span<const double> points, std::size_t d,
             std::span<const double> dirs, std::span<double> out);

}  // namespace watch::kernels
