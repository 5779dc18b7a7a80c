#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "branchstab/rng.hpp"

namespace branchstab {

/// Rectangular observation window, flat or with periodic boundary.
struct Window {
  enum class Kind { Box, Torus };
  Kind kind = Kind::Box;
  std::vector<double> sides;  // positive lengths, one per dimension

  int dim() const { return static_cast<int>(sides.size()); }
  double volume() const;
  bool contains(std::span<const double> x) const;
  /// Reduces a coordinate vector modulo the torus sides (identity for boxes).
  std::vector<double> wrap(std::span<const double> x) const;
};

/// Finite counting measure: locations with positive integer multiplicities.
struct PointConfig {
  struct Point {
    std::vector<double> x;
    std::uint64_t mult = 1;
  };
  std::vector<Point> points;

  std::uint64_t total() const;
  void add(std::vector<double> x, std::uint64_t mult);
  /// Superposition.
  PointConfig& operator+=(const PointConfig& other);
};

/// Upper bound on materialised points per sampled configuration.  Heavy
/// tailed cluster sizes are clamped here; the clipped mass is ~1e-4 at the
/// exponents used in the test suites and far below every test resolution.
inline constexpr std::uint64_t kMaxMaterialisedPoints = std::uint64_t{1} << 22;

/// Piecewise-constant function on a rectangular grid covering a window.
struct GridFunction {
  std::vector<int> shape;      // cells per dimension
  std::vector<double> values;  // row-major, size = prod(shape)

  static GridFunction constant(const std::vector<int>& shape, double v);
  std::size_t cell_of(const Window& w, std::span<const double> x) const;
  double operator()(const Window& w, std::span<const double> x) const;
  double cell_volume(const Window& w) const;
  /// Applies f to every cell value.
  GridFunction map(const std::function<double(double)>& f) const;
  /// Integral against the Lebesgue measure on the window.
  double integral(const Window& w) const;
};

/// Deterministic intensity measure: point atoms plus a piecewise-constant
/// density part.  Total mass must be finite (it always is on a window).
struct IntensityMeasure {
  struct Atom {
    std::vector<double> x;
    double mass = 0.0;
  };
  std::vector<Atom> atoms;
  bool has_density = false;
  GridFunction density;  // nonnegative cell values

  double total_mass(const Window& w) const;
  IntensityMeasure scaled(double factor) const;
  /// Integral of f against the measure.
  double integrate(const Window& w, const GridFunction& f) const;
  /// Draws one location from the normalised measure.
  std::vector<double> sample_location(const Window& w, RngStream& rng) const;
};

/// Test function with cell values in (0,1]; h == 1 outside the cells where
/// it is lowered.
struct TestFunction {
  GridFunction g;

  double operator()(const Window& w, std::span<const double> x) const {
    return g(w, x);
  }
  TestFunction map(const std::function<double(double)>& f) const {
    return TestFunction{g.map(f)};
  }
};

/// Monte Carlo estimate with its standard error.
struct MCEstimate {
  double value = 0.0;
  double se = 0.0;
};

PointConfig poisson_sample(const Window& w, const IntensityMeasure& mu,
                           RngStream& rng);

using MeasureSampler = std::function<IntensityMeasure(RngStream&)>;

/// Cox (doubly stochastic Poisson) sample: realises the parameter measure,
/// then a Poisson configuration from it.
PointConfig cox_sample(const Window& w, const MeasureSampler& measure_sampler,
                       RngStream& rng);

using ComponentSampler =
    std::function<PointConfig(std::span<const double> location, RngStream&)>;

/// Cluster superposition: one independent component draw per multiplicity
/// unit of the centre configuration.
PointConfig cluster_compose(const Window& w, const PointConfig& center,
                            const ComponentSampler& component, RngStream& rng);

/// log of prod_points h(x)^mult; -inf when h vanishes numerically.
double log_pgfl_weight(const Window& w, const PointConfig& c,
                       const TestFunction& h);

/// Monte Carlo probability generating functional estimate
/// E prod h(x_i)^{m_i} over n replicates, one substream per replicate.
MCEstimate empirical_pgfl(const Window& w,
                          const std::function<PointConfig(RngStream&)>& sampler,
                          const TestFunction& h, std::size_t n,
                          StreamFamily streams, int workers = 1);

/// Monte Carlo Laplace functional estimate E exp{-<u, xi>}.
MCEstimate empirical_laplace(const Window& w, const MeasureSampler& sampler,
                             const GridFunction& u, std::size_t n,
                             StreamFamily streams, int workers = 1);

}  // namespace branchstab
