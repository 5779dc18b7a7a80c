#include "branchstab/cb.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "branchstab/numerics.hpp"

namespace branchstab {

void FellerParams::validate() const {
  if (!(b > 0.0)) throw std::invalid_argument("FellerParams: b must be > 0");
}

double v_transform(const FellerParams& p, double t, double z) {
  p.validate();
  if (t < 0.0 || z < 0.0)
    throw std::invalid_argument("v_transform: t, z must be >= 0");
  const double u = std::exp(-t);
  return z * u / (1.0 + 0.5 * p.b * (1.0 - u) * z);
}

double feller_transition_sample(const FellerParams& p, double x, double t,
                                RngStream& rng) {
  p.validate();
  if (x < 0.0) throw std::invalid_argument("feller_transition_sample: x >= 0");
  if (!(t > 0.0)) throw std::invalid_argument("feller_transition_sample: t > 0");
  if (x == 0.0) return 0.0;
  const double u = std::exp(-t);
  const double ct = 0.5 * p.b * (1.0 - u);
  const std::uint64_t n = rng.poisson(x * u / ct);
  if (n == 0) return 0.0;
  return rng.gamma(static_cast<double>(n), ct);
}

double cb_mult(const FellerParams& p, double t, double xi, RngStream& rng) {
  if (!(t > 0.0 && t <= 1.0))
    throw std::invalid_argument("cb_mult: t must be in (0,1]");
  if (t == 1.0) return xi;
  return feller_transition_sample(p, xi, -std::log(t), rng);
}

double yaglom_cb_sample(const FellerParams& p, RngStream& rng) {
  p.validate();
  return rng.exponential(0.5 * p.b);
}

double yaglom_cb_laplace(const FellerParams& p, double z) {
  p.validate();
  return 1.0 / (1.0 + 0.5 * p.b * z);
}

TestReport thinning_identity_check(const FellerParams& p, double t,
                                   std::size_t n, StreamFamily streams,
                                   double alpha_level, int workers) {
  if (!(t > 0.0 && t <= 1.0))
    throw std::invalid_argument("thinning_identity_check: t in (0,1]");
  std::vector<double> a(n), b(n);
  parallel_for(n, workers, [&](std::uint64_t i) {
    RngStream ra = streams.block(0).stream(i);
    a[i] = cb_mult(p, t, yaglom_cb_sample(p, ra), ra);
    RngStream rb = streams.block(1).stream(i);
    b[i] = rb.uniform() < t ? yaglom_cb_sample(p, rb) : 0.0;
  });
  TestReport r = two_sample_reals("cb_thinning_identity", a, b, alpha_level,
                                  streams.seed);
  return r;
}

double vstable_sample(const FellerParams& p, const StableParams& sp,
                      RngStream& rng) {
  p.validate();
  sp.validate();
  const std::uint64_t x = das_rv_sample(sp, rng);
  if (x == 0) return 0.0;
  return rng.gamma(static_cast<double>(x), 0.5 * p.b);
}

double vstable_laplace_closed(const FellerParams& p, const StableParams& sp,
                              double z) {
  p.validate();
  sp.validate();
  const double r = 0.5 * p.b * z / (1.0 + 0.5 * p.b * z);
  return std::exp(-sp.c * std::pow(r, sp.alpha));
}

TestReport cox_coupling_check(double lambda, const FellerParams& p,
                              const StableParams& sp, std::size_t n,
                              StreamFamily streams, double alpha_level,
                              int workers) {
  p.validate();
  sp.validate();
  if (std::fabs(p.b - 2.0 * lambda) > 1e-12)
    throw std::invalid_argument(
        "cox_coupling_check: the coupling requires b = 2 lambda (got b=" +
        std::to_string(p.b) + ", lambda=" + std::to_string(lambda) + ")");
  const BranchingSemigroup sg = BranchingSemigroup::linear_birth_death(lambda);

  // (i) Deterministic transform identity F_t(z) = 1 - V_t(1 - z).
  double worst = 0.0;
  for (double t : {0.1, 0.5, 1.0, 2.0, 5.0})
    for (double z : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
      const double lhs = sg.F(t, z);
      const double rhs = 1.0 - v_transform(p, t, 1.0 - z);
      worst = std::max(worst, std::fabs(lhs - rhs));
    }
  if (worst > 1e-12) {
    TestReport r = TestReport::make("cox_coupling", worst, 0.0, 30, 30,
                                    streams.seed, alpha_level,
                                    "transform identity violated");
    r.pass = false;
    return r;
  }

  // (ii) The Poisson count driven by the stable mass is branching-stable:
  // two-sample test of the splitting identity at t = 0.5, plus a band test
  // of the empirical p.g.f. against exp{-c kappa A(z)^alpha} with
  // kappa = (lambda/(1+lambda))^alpha.
  const double t = 0.5;
  const double ta = std::pow(t, 1.0 / sp.alpha);
  const double tb = std::pow(1.0 - t, 1.0 / sp.alpha);
  std::vector<std::uint64_t> direct(n), split(n);
  const std::vector<double> zs = {0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<std::vector<double>> pow_z(zs.size(), std::vector<double>(n));
  parallel_for(n, workers, [&](std::uint64_t i) {
    RngStream ra = streams.block(2).stream(i);
    direct[i] = ra.poisson(vstable_sample(p, sp, ra));
    for (std::size_t k = 0; k < zs.size(); ++k)
      pow_z[k][i] = std::pow(zs[k], static_cast<double>(direct[i]));
    RngStream rb = streams.block(3).stream(i);
    const std::uint64_t x1 = rb.poisson(vstable_sample(p, sp, rb));
    const std::uint64_t x2 = rb.poisson(vstable_sample(p, sp, rb));
    split[i] = branch_count(sg, ta, x1, rb) + branch_count(sg, tb, x2, rb);
  });
  TestReport stab = two_sample_counts("cox_coupling_stability", direct, split,
                                      alpha_level, streams.seed);

  const double kappa = std::pow(lambda / (1.0 + lambda), sp.alpha);
  std::vector<MCEstimate> est(zs.size());
  std::vector<double> targets(zs.size());
  for (std::size_t k = 0; k < zs.size(); ++k) {
    double mean = 0.0;
    for (double v : pow_z[k]) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : pow_z[k]) ss += (v - mean) * (v - mean);
    est[k] = MCEstimate{mean, std::sqrt(ss / (static_cast<double>(n) - 1.0) /
                                        static_cast<double>(n))};
    targets[k] =
        std::exp(-sp.c * kappa * std::pow(sg.A(zs[k]), sp.alpha));
  }
  TestReport band = transform_band_test("cox_coupling_pgf", est, targets,
                                        alpha_level, streams.seed);

  TestReport r = TestReport::make(
      "cox_coupling", std::max(stab.statistic, band.statistic),
      std::min(stab.p_value, band.p_value), n, n, streams.seed,
      std::max(stab.alpha_level, band.alpha_level),
      "transform identity worst " + std::to_string(worst) +
          "; stability p=" + std::to_string(stab.p_value) +
          "; pgf band max dev=" + std::to_string(band.statistic));
  r.pass = stab.pass && band.pass;
  r.p_value = r.pass ? std::max(r.p_value, r.alpha_level * 1.0000001)
                     : std::min(r.p_value, r.alpha_level);
  return r;
}

}  // namespace branchstab
