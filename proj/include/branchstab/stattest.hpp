#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "branchstab/processes.hpp"
#include "branchstab/rng.hpp"

namespace branchstab {

/// Named statistical verdict.  pass holds exactly when p_value > alpha_level.
struct TestReport {
  std::string name;
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  std::uint64_t seed = 0;
  double alpha_level = 0.01;
  bool pass = true;
  std::string detail;

  static TestReport make(std::string name, double statistic, double p_value,
                         std::size_t n_a, std::size_t n_b, std::uint64_t seed,
                         double alpha_level, std::string detail = {});
};

/// Two-sample equality-in-distribution test for counts: chi-square on
/// pooled-binned pmfs (bins merged until every expected cell is >= 5)
/// combined with a two-sample KS on the values, Bonferroni-combined.
TestReport two_sample_counts(const std::string& name,
                             std::span<const std::uint64_t> a,
                             std::span<const std::uint64_t> b,
                             double alpha_level = 0.01, std::uint64_t seed = 0);

/// Two-sample KS for non-negative reals; an atom at zero is split off into a
/// proportion z-test, Bonferroni-combined with KS on the positive parts.
TestReport two_sample_reals(const std::string& name, std::span<const double> a,
                            std::span<const double> b, double alpha_level = 0.01,
                            std::uint64_t seed = 0);

/// Rectangular grid of cells tiling a window; finite-dimensional proxy for
/// equality of point-process laws.
struct CellPartition {
  std::vector<int> shape;  // cells per dimension, total >= 2

  std::size_t cell_count() const;
  std::size_t cell_index(const Window& w, std::span<const double> x) const;
  /// Multiplicity mass per cell.
  std::vector<std::uint64_t> counts(const Window& w, const PointConfig& c) const;
};

using ConfigSampler = std::function<PointConfig(RngStream&)>;

/// Equality-in-law test between two point-process samplers: per-cell count
/// tests plus a total-count test, Bonferroni over cells.  Replicate i of
/// either side uses its own substream, so the verdict is deterministic in
/// (streams, N).
TestReport pp_equality_test(const std::string& name, const Window& w,
                            const ConfigSampler& sampler_a,
                            const ConfigSampler& sampler_b,
                            const CellPartition& part, std::size_t n,
                            StreamFamily streams, double alpha_level = 0.01,
                            int workers = 1);

/// Pass iff every |estimate - target| <= 3 se; statistic is the worst
/// standardised deviation.
TestReport transform_band_test(const std::string& name,
                               std::span<const MCEstimate> estimates,
                               std::span<const double> targets,
                               double alpha_level = 0.01,
                               std::uint64_t seed = 0);

}  // namespace branchstab
