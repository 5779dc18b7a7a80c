#pragma once

#include "branchstab/discrete_ops.hpp"
#include "branchstab/rng.hpp"
#include "branchstab/semigroups.hpp"
#include "branchstab/stattest.hpp"

namespace branchstab {

/// Subcritical Feller diffusion dZ = -Z dt + sqrt(b Z) dW; the drift is
/// normalised so the one-unit mean at time t is exactly e^{-t}.
struct FellerParams {
  double b = 2.0;  // diffusion coefficient, > 0

  void validate() const;
};

/// Laplace exponent of the transition: E e^{-z Z_t^x} = e^{-x V_t(z)} with
/// V_t(z) = z e^{-t} / (1 + (b/2)(1 - e^{-t}) z).
double v_transform(const FellerParams& p, double t, double z);

/// Exact draw of Z_t started from mass x: a Poisson(x e^{-t} / c_t) number
/// of Exponential(mean c_t) excursions with c_t = (b/2)(1 - e^{-t}).
double feller_transition_sample(const FellerParams& p, double x, double t,
                                RngStream& rng);

/// Continuous branching multiplication: runs the diffusion from xi for time
/// -ln t; t = 1 is the identity.
double cb_mult(const FellerParams& p, double t, double xi, RngStream& rng);

/// Quasi-stationary (conditional limit) law: Exponential with mean b/2.
double yaglom_cb_sample(const FellerParams& p, RngStream& rng);

/// Laplace transform of the quasi-stationary law, 1 / (1 + (b/2) z).
double yaglom_cb_laplace(const FellerParams& p, double z);

/// Two-sample check that running the quasi-stationary law for time -ln t
/// equals Bernoulli(t)-thinning of a fresh draw.
TestReport thinning_identity_check(const FellerParams& p, double t,
                                   std::size_t n, StreamFamily streams,
                                   double alpha_level = 0.01, int workers = 1);

/// Stable continuous mass: a discrete-stable number of independent
/// quasi-stationary excursions; Laplace transform
/// exp{-c ((b/2) z / (1 + (b/2) z))^alpha}.
double vstable_sample(const FellerParams& p, const StableParams& sp,
                      RngStream& rng);

/// Closed-form Laplace transform of vstable_sample.
double vstable_laplace_closed(const FellerParams& p, const StableParams& sp,
                              double z);

/// Couples the birth-death semigroup with lambda = b/2 to the diffusion:
/// (i) checks F_t(z) = 1 - V_t(1 - z) on a grid to 1e-12, and (ii) checks
/// that a Poisson count driven by vstable_sample is branching-stable under
/// that semigroup, including its closed-form p.g.f.
TestReport cox_coupling_check(double lambda, const FellerParams& p,
                              const StableParams& sp, std::size_t n,
                              StreamFamily streams, double alpha_level = 0.01,
                              int workers = 1);

}  // namespace branchstab
