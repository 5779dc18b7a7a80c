#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "branchstab/rng.hpp"

namespace branchstab {

struct TestReport;  // stattest.hpp

/// Finite-support offspring distribution of a subcritical branching event,
/// together with the per-particle branch rate.  Construction normalises the
/// rate so that the one-particle mean at time s is exactly e^{-s}.
struct OffspringLaw {
  std::vector<std::pair<int, double>> probs;  // (k, p_k), p_1 must be 0
  double branch_rate = 0.0;

  double mean() const;
  /// Offspring p.g.f. g(z).
  double pgf(double z) const;
  /// Draws an offspring count.
  int sample(RngStream& rng) const;

  /// Validates and rescales the rate to 1/(1-mean).  Throws
  /// std::invalid_argument for supercritical/critical laws or p_1 > 0.
  static OffspringLaw normalised(std::vector<std::pair<int, double>> probs);
};

/// Yaglom (limiting conditional) law of a subcritical branching process.
struct YaglomLaw {
  enum class Rep { Constant, ShiftedGeometric, Empirical };
  Rep rep = Rep::Constant;
  /// Success probability for the shifted-geometric representation.
  double p = 1.0;
  /// Empirical pmf over {1,...,K}; pmf[k-1] = P(Y = k).
  std::vector<double> pmf;
  double tail_mass = 0.0;
  /// Total-variation distance between the horizon and half-horizon estimates.
  double diagnostic = 0.0;

  std::uint64_t sample(RngStream& rng) const;
  /// Sum of n independent draws.  O(1) for the closed-form representations
  /// (negative-binomial identity), O(support) for Empirical.
  std::uint64_t sample_sum(std::uint64_t n, RngStream& rng) const;
  /// p.g.f. of the law (equals the B-function of the driving semigroup).
  double pgf(double z) const;
};

/// Subcritical continuous-time Markov branching semigroup on the
/// non-negative integers.  Exposes F_s, the generator U, the A/B cocycle
/// functions and Yaglom sampling.  Immutable and safe to share.
class BranchingSemigroup {
 public:
  enum class Kind { PureDeath, LinearBirthDeath, General };

  static BranchingSemigroup pure_death();
  static BranchingSemigroup linear_birth_death(double lambda);
  static BranchingSemigroup general(OffspringLaw law);

  Kind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  const OffspringLaw& offspring() const { return law_; }

  /// F_s(z), the p.g.f. of the particle count at time s started from one.
  /// Closed form for PureDeath / LinearBirthDeath; adaptive Runge-Kutta on
  /// dF/ds = U(F) otherwise.
  double F(double s, double z) const;
  /// Semigroup generator U(z) = rate (g(z) - z).
  double U(double z) const;
  /// A(z) = exp{-int_0^z dx/U(x)}; strictly decreasing, A(0)=1, A(1)=0.
  double A(double z) const;
  /// B(z) = 1 - A(z), the p.g.f. of the Yaglom law.
  double B(double z) const;

  /// Yaglom law.  Closed form where available; otherwise an empirical pmf
  /// from a Fleming-Viot style conditioned particle simulation run to
  /// horizon s_max, with a convergence diagnostic against horizon s_max/2.
  /// Throws std::runtime_error when the diagnostic exceeds 0.01.
  YaglomLaw yaglom(int cutoff, double s_max, RngStream& rng,
                   int chains = 100000) const;

 private:
  BranchingSemigroup() = default;
  Kind kind_ = Kind::PureDeath;
  double lambda_ = 0.0;  // LinearBirthDeath parameter
  OffspringLaw law_;
};

struct SemigroupGridPoint {
  double s, t, z;
};

/// Checks the composition law, the mean identity and the boundary limits on
/// the supplied grid.  Failures are reported, not thrown.
TestReport validate_conditions(const BranchingSemigroup& sg,
                               const std::vector<SemigroupGridPoint>& grid,
                               double tol);

}  // namespace branchstab
