#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "branchstab/stattest.hpp"

using namespace branchstab;

namespace {

const Window kBox{Window::Kind::Box, {1.0, 1.0}};

std::vector<std::uint64_t> poisson_draws(double lambda, std::size_t n,
                                         RngStream& rng) {
  std::vector<std::uint64_t> v(n);
  for (auto& x : v) x = rng.poisson(lambda);
  return v;
}

}  // namespace

TEST_CASE("count test: null calibration and invariants") {
  RngStream rng(71);
  const std::size_t n = 50000;
  const auto a = poisson_draws(3.0, n, rng);
  const auto b = poisson_draws(3.0, n, rng);
  const TestReport r = two_sample_counts("counts_null", a, b, 0.01, 71);
  CHECK(r.pass);
  CHECK(r.pass == (r.p_value > r.alpha_level));
  CHECK(r.n_a == n);
  CHECK(r.n_b == n);
  CHECK(r.seed == 71);

  // Identical samples trivially pass.
  CHECK(two_sample_counts("same", a, a, 0.01, 71).pass);

  // Small calibration check: the rejection rate at level 0.05 over
  // independent null pairs stays well below twice the level.
  int rejections = 0;
  for (int k = 0; k < 100; ++k) {
    const auto x = poisson_draws(2.0, 2000, rng);
    const auto y = poisson_draws(2.0, 2000, rng);
    rejections += !two_sample_counts("cal", x, y, 0.05, 71).pass;
  }
  CHECK(rejections <= 10);
}

TEST_CASE("count test: power against mean and shape shifts") {
  RngStream rng(72);
  const std::size_t n = 50000;
  const auto a = poisson_draws(3.0, n, rng);
  const auto mean_shift = poisson_draws(3.15, n, rng);
  const TestReport r1 = two_sample_counts("mean_shift", a, mean_shift, 0.01, 72);
  CHECK_FALSE(r1.pass);
  CHECK(r1.p_value < 0.001);

  // Same mean, different shape (negative binomial vs Poisson).
  std::vector<std::uint64_t> shape_shift(n);
  for (auto& x : shape_shift) x = rng.poisson(rng.gamma(3.0, 1.0));
  const TestReport r2 =
      two_sample_counts("shape_shift", a, shape_shift, 0.01, 72);
  CHECK_FALSE(r2.pass);
  CHECK(r2.p_value < 0.001);
}

TEST_CASE("real-valued test: zero atom plus positive part") {
  RngStream rng(73);
  const std::size_t n = 50000;
  std::vector<double> a(n), b(n), c(n), d(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rng.uniform() < 0.3 ? 0.0 : rng.exponential(1.0);
    b[i] = rng.uniform() < 0.3 ? 0.0 : rng.exponential(1.0);
    c[i] = rng.uniform() < 0.4 ? 0.0 : rng.exponential(1.0);  // atom shift
    d[i] = rng.uniform() < 0.3 ? 0.0 : rng.exponential(1.3);  // scale shift
  }
  CHECK(two_sample_reals("reals_null", a, b, 0.01, 73).pass);
  const TestReport ra = two_sample_reals("atom_shift", a, c, 0.01, 73);
  CHECK_FALSE(ra.pass);
  CHECK(ra.p_value < 0.001);
  const TestReport rs = two_sample_reals("scale_shift", a, d, 0.01, 73);
  CHECK_FALSE(rs.pass);
  CHECK(rs.p_value < 0.001);
  CHECK(two_sample_reals("same", a, a, 0.01, 73).pass);
}

TEST_CASE("cell partition geometry") {
  const CellPartition part{{2, 2}};
  CHECK(part.cell_count() == 4);
  CHECK(part.cell_index(kBox, std::vector<double>{0.1, 0.1}) == 0);
  CHECK(part.cell_index(kBox, std::vector<double>{0.9, 0.9}) == 3);
  PointConfig c;
  c.add({0.25, 0.25}, 2);
  c.add({0.75, 0.25}, 1);
  const auto counts = part.counts(kBox, c);
  CHECK(counts.size() == 4);
  CHECK(counts[0] + counts[1] + counts[2] + counts[3] == 3);
}

TEST_CASE("point-process equality test") {
  IntensityMeasure mu;
  mu.has_density = true;
  mu.density = GridFunction::constant({2, 2}, 3.0);
  const ConfigSampler pois = [&](RngStream& r) {
    return poisson_sample(kBox, mu, r);
  };
  CHECK(pp_equality_test("pp_null", kBox, pois, pois, CellPartition{{2, 2}},
                         50000, StreamFamily{74, 0}, 0.01, 4)
            .pass);

  // Intensity tilt within one cell: same total mass, wrong geometry.
  IntensityMeasure tilted;
  tilted.has_density = true;
  tilted.density = GridFunction::constant({2, 2}, 3.0);
  tilted.density.values = {4.2, 2.6, 2.6, 2.6};
  const ConfigSampler tilt = [&](RngStream& r) {
    return poisson_sample(kBox, tilted, r);
  };
  const TestReport r = pp_equality_test("pp_tilt", kBox, pois, tilt,
                                        CellPartition{{2, 2}}, 50000,
                                        StreamFamily{74, 0}, 0.01, 4);
  CHECK_FALSE(r.pass);
  CHECK(r.p_value < 0.001);

  // Worker-count invariance of the verdict and statistic.
  const TestReport w1 = pp_equality_test("pp_det", kBox, pois, pois,
                                         CellPartition{{2, 2}}, 20000,
                                         StreamFamily{75, 0}, 0.01, 1);
  const TestReport w4 = pp_equality_test("pp_det", kBox, pois, pois,
                                         CellPartition{{2, 2}}, 20000,
                                         StreamFamily{75, 0}, 0.01, 4);
  CHECK(w1.statistic == w4.statistic);
  CHECK(w1.p_value == w4.p_value);
}

TEST_CASE("band test over transform estimates") {
  const std::vector<MCEstimate> est = {{0.50, 0.01}, {0.30, 0.02}};
  const std::vector<double> good = {0.51, 0.27};
  const std::vector<double> bad = {0.55, 0.27};
  const TestReport ok = transform_band_test("band_ok", est, good, 0.01, 76);
  CHECK(ok.pass);
  CHECK(ok.pass == (ok.p_value > ok.alpha_level));
  CHECK(ok.statistic == doctest::Approx(1.5));
  const TestReport fail = transform_band_test("band_fail", est, bad, 0.01, 76);
  CHECK_FALSE(fail.pass);
  CHECK(fail.pass == (fail.p_value > fail.alpha_level));
  CHECK(fail.statistic == doctest::Approx(5.0));
}
