#include "branchstab/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace branchstab {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed;
  (void)splitmix64(x);
  x ^= 0xd1342543de82ef95ULL * (stream + 1);
  for (auto& w : state_) w = splitmix64(x);
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double a, double b) { return a + (b - a) * uniform(); }

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

double RngStream::exponential(double mean) { return -mean * std::log(uniform()); }

double RngStream::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

double RngStream::gamma(double shape, double scale) {
  if (shape <= 0.0 || scale <= 0.0)
    throw std::invalid_argument("gamma: shape and scale must be positive");
  if (shape < 1.0) {
    // Boost to shape+1 and correct with a power of a uniform.
    const double u = uniform();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v))
      return d * v * scale;
  }
}

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    // Knuth product-of-uniforms.
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }
  // Transformed rejection (Hormann PTRS).
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = uniform() - 0.5;
    double v = uniform();
    const double u_shifted = 0.5 - std::fabs(u);
    const double kd = std::floor((2.0 * a / u_shifted + b) * u + mean + 0.43);
    if (u_shifted >= 0.07 && v <= v_r && kd >= 0.0)
      return static_cast<std::uint64_t>(kd);
    if (kd < 0.0 || (u_shifted < 0.013 && v > u_shifted)) continue;
    if (std::log(v * inv_alpha / (a / (u_shifted * u_shifted) + b)) <=
        kd * log_mean - mean - std::lgamma(kd + 1.0))
      return static_cast<std::uint64_t>(kd);
  }
}

std::uint64_t RngStream::binomial(std::uint64_t n, double p) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  const bool flip = p > 0.5;
  const double q = flip ? 1.0 - p : p;
  const double nd = static_cast<double>(n);
  const double mean = nd * q;
  std::uint64_t k = 0;
  if (mean < 50.0) {
    // Waiting-time method: skip geometric gaps between successes.
    const double r = std::log1p(-q);
    double i = 0.0;
    for (;;) {
      i += std::floor(std::log(uniform()) / r) + 1.0;
      if (i > nd) break;
      ++k;
    }
  } else if (mean * (1.0 - q) <= 1.0e4) {
    // Inversion walking outward from the mode; exact pmf via lgamma.
    const auto lpmf = [&](double j) {
      return std::lgamma(nd + 1.0) - std::lgamma(j + 1.0) -
             std::lgamma(nd - j + 1.0) + j * std::log(q) +
             (nd - j) * std::log1p(-q);
    };
    const double m = std::floor((nd + 1.0) * q);
    const double ratio = q / (1.0 - q);
    double u = uniform() - std::exp(lpmf(m));
    double lo = m, hi = m;
    double p_lo = std::exp(lpmf(m)), p_hi = p_lo;
    bool done = u < 0.0;
    double pick = m;
    int guard = 0;
    while (!done && ++guard < 4000) {
      if (hi < nd) {
        p_hi *= (nd - hi) / (hi + 1.0) * ratio;
        hi += 1.0;
        u -= p_hi;
        if (u < 0.0) { pick = hi; break; }
      }
      if (lo > 0.0) {
        p_lo *= lo / (nd - lo + 1.0) / ratio;
        lo -= 1.0;
        u -= p_lo;
        if (u < 0.0) { pick = lo; break; }
      }
      if (hi >= nd && lo <= 0.0) { pick = m; break; }
    }
    if (!done && guard >= 4000) pick = m;  // lost mass below 1e-300, keep mode
    k = static_cast<std::uint64_t>(pick);
  } else {
    // Variance is large enough that the rounded-normal law is
    // indistinguishable at the sample sizes used anywhere in this library.
    const double sd = std::sqrt(mean * (1.0 - q));
    double x = std::floor(mean + sd * normal() + 0.5);
    if (x < 0.0) x = 0.0;
    if (x > nd) x = nd;
    k = static_cast<std::uint64_t>(x);
  }
  return flip ? n - k : k;
}

void parallel_for(std::uint64_t n, int workers,
                  const std::function<void(std::uint64_t)>& body) {
  if (workers <= 1 || n < 2) {
    for (std::uint64_t i = 0; i < n; ++i) body(i);
    return;
  }
  const int w = workers;
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(w));
  for (int t = 0; t < w; ++t) {
    threads.emplace_back([&, t] {
      for (std::uint64_t i = static_cast<std::uint64_t>(t); i < n;
           i += static_cast<std::uint64_t>(w))
        body(i);
    });
  }
  for (auto& th : threads) th.join();
}

}  // namespace branchstab
