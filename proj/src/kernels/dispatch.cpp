#include <atomic>
#include <cstdlib>
#include <string>

#include "watch/error.hpp"
#include "watch/kernels.hpp"

namespace watch::kernels {
namespace {

using ProjectFn = void (*)(const double*, std::size_t, std::size_t,
                           const double*, std::size_t, double*) noexcept;

ProjectFn function_for(Isa isa) noexcept {
  switch (isa) {
#if defined(WATCH_HAVE_AVX2)
    case Isa::avx2:
      return &project_avx2;
#endif
#if defined(WATCH_HAVE_NEON)
    case Isa::neon:
      return &project_neon;
#endif
    default:
      return &project_scalar;
  }
}

Isa initial_isa() noexcept {
  if (const char* env = std::getenv("WATCH_KERNEL")) {
    if (auto isa = parse_isa(env); isa && isa_available(*isa)) {
      return *isa;
    }
  }
  if (isa_available(Isa::avx2)) return Isa::avx2;
  if (isa_available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

std::atomic<Isa>& active_slot() noexcept {
  static std::atomic<Isa> slot{initial_isa()};
  return slot;
}

void check_sizes(std::span<const double> points, std::size_t d,
                 std::span<const double> dirs, std::span<double> out) {
  if (d == 0 || points.size() % d != 0 || dirs.size() % d != 0) {
    throw InvalidInput("projection blocks are not multiples of the dimension");
  }
  if (out.size() != (points.size() / d) * (dirs.size() / d)) {
    throw InvalidInput("projection output has the wrong size");
  }
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
    case Isa::scalar:
      break;
  }
  return "scalar";
}

std::optional<Isa> parse_isa(std::string_view name) noexcept {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  if (name == "neon") return Isa::neon;
  return std::nullopt;
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(WATCH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(WATCH_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept { return active_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw InvalidInput("kernel variant '" + std::string(isa_name(isa)) +
                       "' is not available on this machine");
  }
  active_slot().store(isa, std::memory_order_relaxed);
}

void project_with(Isa isa, std::span<const double> points, std::size_t d,
                  std::span<const double> dirs, std::span<double> out) {
  if (!isa_available(isa)) {
    throw InvalidInput("kernel variant '" + std::string(isa_name(isa)) +
                       "' is not available on this machine");
  }
  check_sizes(points, d, dirs, out);
  function_for(isa)(points.data(), points.size() / d, d, dirs.data(),
                    dirs.size() / d, out.data());
}

void project(std::span<const double> points, std::size_t d,
             std::span<const double> dirs, std::span<double> out) {
  check_sizes(points, d, dirs, out);
  function_for(active_isa())(points.data(), points.size() / d, d, dirs.data(),
                             dirs.size() / d, out.data());
}

}  // namespace watch::kernels
