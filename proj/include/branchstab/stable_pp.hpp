#pragma once

#include "branchstab/discrete_ops.hpp"
#include "branchstab/processes.hpp"
#include "branchstab/semigroups.hpp"

namespace branchstab {

/// Discrete spectral measure supported on probability measures: a finite
/// list of (weight, probability measure) components.
struct SpectralMeasureM1 {
  struct Component {
    double weight = 1.0;
    IntensityMeasure mu;
  };
  std::vector<Component> components;

  double total_weight() const;
  void validate(const Window& w) const;
};

/// K i.i.d. points from mu with K ~ Sibuya(alpha); p.g.fl.
/// 1 - <1-h, mu>^alpha.
PointConfig sibuya_pp_sample(double alpha, const Window& w,
                             const IntensityMeasure& mu, RngStream& rng);

/// Poisson cluster process of Sibuya components; p.g.fl.
/// exp{-sum_j w_j <1-h, mu_j>^alpha}.  Thinning-stable with exponent alpha.
PointConfig das_pp_sample(double alpha, const Window& w,
                          const SpectralMeasureM1& sigma, RngStream& rng);

/// Branching-stable point process: the cluster construction above with each
/// multiplicity unit replaced by an independent draw from `yaglom`; p.g.fl.
/// exp{-sum_j w_j <1-B(h), mu_j>^alpha}.
PointConfig fstable_pp_sample(const YaglomLaw& yaglom, double alpha,
                              const Window& w, const SpectralMeasureM1& sigma,
                              RngStream& rng);

/// Closed-form p.g.fl. of fstable_pp_sample at a cell test function.
double fstable_pp_pgfl_closed(const BranchingSemigroup& sg, double alpha,
                              const Window& w, const SpectralMeasureM1& sigma,
                              const TestFunction& h);

/// Branching multiplication of a configuration: each point's multiplicity is
/// replaced by branch_count(sg, t, multiplicity) at the same location.
PointConfig branch_op_pp(const BranchingSemigroup& sg, double t,
                         const PointConfig& phi, RngStream& rng);

}  // namespace branchstab
