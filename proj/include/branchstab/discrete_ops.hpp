#pragma once

#include <cstdint>

#include "branchstab/rng.hpp"
#include "branchstab/semigroups.hpp"

namespace branchstab {

/// Exponent and scale of the stable p.g.f. exp{-c A(z)^alpha}.
struct StableParams {
  double alpha = 0.5;
  double c = 1.0;

  void validate() const;
};

/// Independent Bernoulli(t) retention of each of x units.
std::uint64_t thin(std::uint64_t x, double t, RngStream& rng);

/// Branching multiplication: the sum of x independent one-particle
/// populations run for time -ln t.  Exact closed-form samplers for the
/// PureDeath and LinearBirthDeath kinds, Gillespie simulation otherwise.
/// t = 0 is rejected (the limit law is the zero count; use thin(x, 0)).
std::uint64_t branch_count(const BranchingSemigroup& sg, double t,
                           std::uint64_t x, RngStream& rng);

/// Positive count with p.g.f. 1 - (1-z)^alpha (success index of Bernoulli
/// trials with success probability alpha/k at trial k).
std::uint64_t sibuya_sample(double alpha, RngStream& rng);

/// Discrete-alpha-stable count: p.g.f. exp{-c(1-z)^alpha}, sampled as a
/// Poisson(c) sum of independent Sibuya(alpha) summands.
std::uint64_t das_rv_sample(const StableParams& p, RngStream& rng);

/// Branching-stable count with p.g.f. exp{-c A(z)^alpha}: a discrete-stable
/// count of clusters, each contributing an independent draw from `yaglom`.
std::uint64_t fstable_rv_sample(const YaglomLaw& yaglom, const StableParams& p,
                                RngStream& rng);

/// Convenience overload resolving the Yaglom law of a closed-form semigroup.
std::uint64_t fstable_rv_sample(const BranchingSemigroup& sg,
                                const StableParams& p, RngStream& rng);

/// exp{-c A(z)^alpha}.
double pgf_closed(const BranchingSemigroup& sg, const StableParams& p, double z);

}  // namespace branchstab
