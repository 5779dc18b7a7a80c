#pragma once

#include <array>
#include <cstdint>
#include <functional>

namespace branchstab {

/// Mixes a 64-bit state forward and returns a well-scrambled word.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seedable random stream with keyed substreams.
///
/// A (seed, stream) pair selects an independent generator, so replicate i of
/// a Monte Carlo batch can be assigned stream i and produce the same numbers
/// regardless of which worker thread runs it.  The core generator is
/// xoshiro256**; all samplers are hand-rolled so results do not depend on the
/// standard library implementation.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  /// Uniform on the open interval (0,1).
  double uniform();
  /// Uniform on [a,b).
  double uniform(double a, double b);
  /// Uniform integer in [0,n), n >= 1.
  std::uint64_t uniform_index(std::uint64_t n);

  double exponential(double mean = 1.0);
  /// Standard normal (Box-Muller, two uniforms per variate).
  double normal();
  /// Gamma(shape, scale), Marsaglia-Tsang squeeze.
  double gamma(double shape, double scale = 1.0);
  std::uint64_t poisson(double mean);
  std::uint64_t binomial(std::uint64_t n, double p);

 private:
  std::array<std::uint64_t, 4> state_;
};

/// A family of substreams rooted at (seed, base); replicate i gets stream
/// base + i.  Callers that need several independent batches space their
/// bases far apart (see kStreamBlock).
struct StreamFamily {
  std::uint64_t seed = 0;
  std::uint64_t base = 0;

  RngStream stream(std::uint64_t i) const { return RngStream(seed, base + i); }
  StreamFamily block(std::uint64_t k) const;
};

/// Stride between stream blocks handed to independent consumers.
inline constexpr std::uint64_t kStreamBlock = std::uint64_t{1} << 32;

inline StreamFamily StreamFamily::block(std::uint64_t k) const {
  return StreamFamily{seed, base + k * kStreamBlock};
}

/// Runs body(0..n-1) across `workers` threads.  The partition of indices is
/// deterministic and the body must only write to per-index slots, so results
/// are identical for any worker count.
void parallel_for(std::uint64_t n, int workers,
                  const std::function<void(std::uint64_t)>& body);

}  // namespace branchstab
