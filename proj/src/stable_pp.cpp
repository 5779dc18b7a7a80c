#include "branchstab/stable_pp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace branchstab {

double SpectralMeasureM1::total_weight() const {
  double w = 0.0;
  for (const Component& c : components) w += c.weight;
  return w;
}

void SpectralMeasureM1::validate(const Window& w) const {
  if (components.empty())
    throw std::invalid_argument("spectral measure needs >= 1 component");
  for (const Component& c : components) {
    if (!(c.weight > 0.0))
      throw std::invalid_argument("spectral weights must be > 0");
    const double m = c.mu.total_mass(w);
    if (std::fabs(m - 1.0) > 1e-12)
      throw std::invalid_argument(
          "spectral components must be probability measures; got total mass " +
          std::to_string(m));
  }
}

PointConfig sibuya_pp_sample(double alpha, const Window& w,
                             const IntensityMeasure& mu, RngStream& rng) {
  std::uint64_t k = sibuya_sample(alpha, rng);
  if (k > kMaxMaterialisedPoints) k = kMaxMaterialisedPoints;
  PointConfig cfg;
  cfg.points.reserve(k);
  for (std::uint64_t i = 0; i < k; ++i)
    cfg.add(mu.sample_location(w, rng), 1);
  return cfg;
}

PointConfig das_pp_sample(double alpha, const Window& w,
                          const SpectralMeasureM1& sigma, RngStream& rng) {
  sigma.validate(w);
  const double total = sigma.total_weight();
  const std::uint64_t n = rng.poisson(total);
  PointConfig cfg;
  for (std::uint64_t i = 0; i < n; ++i) {
    double u = rng.uniform() * total;
    std::size_t j = 0;
    for (; j + 1 < sigma.components.size(); ++j) {
      u -= sigma.components[j].weight;
      if (u <= 0.0) break;
    }
    cfg += sibuya_pp_sample(alpha, w, sigma.components[j].mu, rng);
  }
  return cfg;
}

PointConfig fstable_pp_sample(const YaglomLaw& yaglom, double alpha,
                              const Window& w, const SpectralMeasureM1& sigma,
                              RngStream& rng) {
  PointConfig cfg = das_pp_sample(alpha, w, sigma, rng);
  PointConfig out;
  out.points.reserve(cfg.points.size());
  for (const PointConfig::Point& p : cfg.points)
    out.add(p.x, yaglom.sample_sum(p.mult, rng));
  return out;
}

double fstable_pp_pgfl_closed(const BranchingSemigroup& sg, double alpha,
                              const Window& w, const SpectralMeasureM1& sigma,
                              const TestFunction& h) {
  sigma.validate(w);
  // <1 - B(h), mu_j> per component, raised to alpha.
  const GridFunction integrand =
      h.g.map([&sg](double z) { return 1.0 - sg.B(z); });
  double expo = 0.0;
  for (const SpectralMeasureM1::Component& c : sigma.components) {
    const double inner = c.mu.integrate(w, integrand);
    expo += c.weight * std::pow(std::max(inner, 0.0), alpha);
  }
  return std::exp(-expo);
}

PointConfig branch_op_pp(const BranchingSemigroup& sg, double t,
                         const PointConfig& phi, RngStream& rng) {
  PointConfig out;
  out.points.reserve(phi.points.size());
  for (const PointConfig::Point& p : phi.points)
    out.add(p.x, branch_count(sg, t, p.mult, rng));
  return out;
}

}  // namespace branchstab
