#pragma once

#include "branchstab/processes.hpp"
#include "branchstab/rng.hpp"

namespace branchstab {

/// Finite mixture of wrapped Gaussian bumps (variance v > 0) and atoms
/// (v = 0) on a torus; masses need not sum to 1.
struct GaussMixMeasure {
  struct Component {
    double mass = 1.0;
    double variance = 0.0;  // per-coordinate; 0 means a point atom
    std::vector<double> center;
  };
  std::vector<Component> components;

  double total_mass() const;
  /// Grid discretisation (atoms kept exact, bumps rasterised cell-wise) for
  /// use as a Cox driving measure.
  IntensityMeasure discretise(const Window& w,
                              const std::vector<int>& shape) const;
};

/// Unique factorisation mu = radial (*) shape with an irreducible shape
/// (one that has a variance-0 component).
struct RadialShapeDecomp {
  double radial = 1.0;
  GaussMixMeasure shape;
};

/// Moves every multiplicity unit independently by a wrapped Gaussian step
/// with per-coordinate variance -ln t.  Torus windows only.
PointConfig diffuse_config(double t, const Window& w, const PointConfig& phi,
                           RngStream& rng);

/// Each unit survives with probability t, then diffuses as above.
PointConfig thin_diffuse_config(double t, const Window& w,
                                const PointConfig& phi, RngStream& rng);

/// Deterministic scaling of a mixture: masses times t, variances plus
/// -ln t, centers unchanged.  Exactly associative.
GaussMixMeasure measure_op_dt(double t, const GaussMixMeasure& mu);

/// Inverts measure_op_dt maximally: radial = exp{-min variance}; round trip
/// measure_op_dt(radial, shape) == mu to machine precision.
RadialShapeDecomp spectral_decompose(const GaussMixMeasure& mu);

/// One-sided alpha-stable positive variate with Laplace transform
/// exp{-z^alpha}, 0 < alpha < 1 (Kanter's representation).
double one_sided_stable_sample(double alpha, RngStream& rng);

/// Random measure total_scale * S * Lebesgue on the torus, S one-sided
/// alpha-stable.  The uniform density is a fixed shape of the heat kernel,
/// so the measure is exactly stable under the deterministic scaling.
IntensityMeasure stable_measure_sample(double alpha, double total_scale,
                                       const Window& w,
                                       const std::vector<int>& shape,
                                       RngStream& rng);

/// Cox process driven by stable_measure_sample.
PointConfig dt_stable_pp_sample(double alpha, double total_scale,
                                const Window& w, const std::vector<int>& shape,
                                RngStream& rng);

/// Poisson sample of the atoms of the product measure (radial law of order
/// alpha) x (shape weights), restricted to radial in (eps, 1]: per shape j,
/// Poisson(w_j (eps^{-alpha} - 1)) atoms, each a scaled bump at center_j.
GaussMixMeasure levy_radial_sample(
    double alpha, const std::vector<std::pair<double, std::vector<double>>>& shapes,
    double eps, RngStream& rng);

/// Inverse-CDF draw of the radial component on (eps, 1]:
/// t = (eps^{-alpha} - U (eps^{-alpha} - 1))^{-1/alpha}.
double radial_inverse_cdf(double alpha, double eps, double u);

}  // namespace branchstab
