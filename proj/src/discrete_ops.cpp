#include "branchstab/discrete_ops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace branchstab {

namespace {

constexpr std::uint64_t kCountCap = std::uint64_t{1} << 62;

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t s = a + b;
  return (s < a || s > kCountCap) ? kCountCap : s;
}

}  // namespace

void StableParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must be in (0,1], got " +
                                std::to_string(alpha));
  if (!(c > 0.0))
    throw std::invalid_argument("c must be > 0, got " + std::to_string(c));
}

std::uint64_t thin(std::uint64_t x, double t, RngStream& rng) {
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("thin: t must be in [0,1]");
  if (t == 1.0) return x;
  if (t == 0.0) return 0;
  return rng.binomial(x, t);
}

std::uint64_t branch_count(const BranchingSemigroup& sg, double t,
                           std::uint64_t x, RngStream& rng) {
  if (!(t > 0.0 && t <= 1.0))
    throw std::invalid_argument(
        "branch_count: t must be in (0,1]; the t=0 limit is the zero count "
        "(use thin(x, 0))");
  if (t == 1.0 || x == 0) return x;
  const double s = -std::log(t);
  switch (sg.kind()) {
    case BranchingSemigroup::Kind::PureDeath:
      return rng.binomial(x, t);
    case BranchingSemigroup::Kind::LinearBirthDeath: {
      // The time-s law is linear-fractional: an atom at 0 of size F_s(0)
      // plus a shifted geometric with success probability 1/(1+L).
      const double L = sg.lambda() * (1.0 - t);
      const double p0 = 1.0 - t / (1.0 + L);
      const std::uint64_t m = rng.binomial(x, 1.0 - p0);
      if (m == 0) return 0;
      // Sum of m shifted geometrics: m + NegBin(m, L/(1+L)), the negative
      // binomial realised as a Gamma(m, L)-mixed Poisson.
      if (L == 0.0) return m;
      return sat_add(m, rng.poisson(rng.gamma(static_cast<double>(m), L)));
    }
    case BranchingSemigroup::Kind::General: {
      double time = 0.0;
      std::uint64_t n = x;
      const double rate = sg.offspring().branch_rate;
      while (n > 0) {
        time += rng.exponential(1.0 / (rate * static_cast<double>(n)));
        if (time > s) break;
        n = n - 1 + static_cast<std::uint64_t>(sg.offspring().sample(rng));
      }
      return n;
    }
  }
  return x;
}

std::uint64_t sibuya_sample(double alpha, RngStream& rng) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("sibuya_sample: alpha must be in (0,1]");
  if (alpha == 1.0) return 1;
  // Inversion on the survival function P(K > k) =
  // Gamma(k+1-alpha) / (Gamma(1-alpha) Gamma(k+1)), monotone decreasing.
  const double target = std::log(1.0 - rng.uniform());  // log V, V ~ U(0,1)
  const double lg1ma = std::lgamma(1.0 - alpha);
  auto log_surv = [&](double k) {
    return std::lgamma(k + 1.0 - alpha) - lg1ma - std::lgamma(k + 1.0);
  };
  // Want the smallest k >= 1 with log P(K > k) <= target.
  if (log_surv(1.0) <= target) return 1;
  double lo = 1.0, hi = 2.0;
  while (log_surv(hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi >= 4.6e18) return kCountCap;
  }
  while (hi - lo > 1.0) {
    const double mid = std::floor(0.5 * (lo + hi));
    if (log_surv(mid) <= target)
      hi = mid;
    else
      lo = mid;
  }
  return static_cast<std::uint64_t>(hi);
}

std::uint64_t das_rv_sample(const StableParams& p, RngStream& rng) {
  p.validate();
  const std::uint64_t n = rng.poisson(p.c);
  std::uint64_t sum = 0;
  for (std::uint64_t i = 0; i < n; ++i)
    sum = sat_add(sum, sibuya_sample(p.alpha, rng));
  return sum;
}

std::uint64_t fstable_rv_sample(const YaglomLaw& yaglom, const StableParams& p,
                                RngStream& rng) {
  const std::uint64_t d = das_rv_sample(p, rng);
  return yaglom.sample_sum(d, rng);
}

std::uint64_t fstable_rv_sample(const BranchingSemigroup& sg,
                                const StableParams& p, RngStream& rng) {
  if (sg.kind() == BranchingSemigroup::Kind::General)
    throw std::invalid_argument(
        "fstable_rv_sample: resolve the Yaglom law of a General semigroup "
        "explicitly (it requires simulation) and pass it in");
  RngStream dummy(0);
  const YaglomLaw law = sg.yaglom(1, 1.0, dummy, 1);
  return fstable_rv_sample(law, p, rng);
}

double pgf_closed(const BranchingSemigroup& sg, const StableParams& p,
                  double z) {
  p.validate();
  return std::exp(-p.c * std::pow(sg.A(z), p.alpha));
}

}  // namespace branchstab
