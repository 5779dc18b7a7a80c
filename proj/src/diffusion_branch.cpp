#include "branchstab/diffusion_branch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace branchstab {

namespace {

void require_torus(const Window& w) {
  if (w.kind != Window::Kind::Torus)
    throw std::invalid_argument(
        "diffusion operations need a torus window (box boundary behaviour "
        "is undefined)");
}

/// Wrapped 1-d Gaussian density on a circle of circumference len.
double wrapped_normal_pdf(double x, double variance, double len) {
  const double sd = std::sqrt(variance);
  double sum = 0.0;
  const int wraps = 1 + static_cast<int>(std::ceil(6.0 * sd / len));
  for (int k = -wraps; k <= wraps; ++k) {
    const double d = x + k * len;
    sum += std::exp(-0.5 * d * d / variance);
  }
  return sum / (sd * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

double GaussMixMeasure::total_mass() const {
  double m = 0.0;
  for (const Component& c : components) m += c.mass;
  return m;
}

IntensityMeasure GaussMixMeasure::discretise(
    const Window& w, const std::vector<int>& shape) const {
  require_torus(w);
  IntensityMeasure out;
  out.has_density = false;
  GridFunction density = GridFunction::constant(shape, 0.0);
  const int d = w.dim();
  for (const Component& c : components) {
    if (c.variance == 0.0) {
      out.atoms.push_back({w.wrap(c.center), c.mass});
      continue;
    }
    out.has_density = true;
    // Midpoint rasterisation: product of wrapped 1-d densities at cell
    // centres, then renormalised so the cell sum carries exactly c.mass.
    std::vector<double> vals(density.values.size());
    double sum = 0.0;
    for (std::size_t idx = 0; idx < vals.size(); ++idx) {
      std::size_t rest = idx;
      double pdf = 1.0;
      for (int i = d - 1; i >= 0; --i) {
        const int s = shape[static_cast<std::size_t>(i)];
        const auto ci = rest % static_cast<std::size_t>(s);
        rest /= static_cast<std::size_t>(s);
        const double len = w.sides[static_cast<std::size_t>(i)];
        const double xc = (static_cast<double>(ci) + 0.5) * len / s;
        pdf *= wrapped_normal_pdf(xc - c.center[static_cast<std::size_t>(i)],
                                  c.variance, len);
      }
      vals[idx] = pdf;
      sum += pdf;
    }
    const double cv = density.cell_volume(w);
    if (!(sum > 0.0) || !std::isfinite(sum)) {
      // The bump is narrower than the grid resolves (density underflows at
      // every cell centre); keep its mass exact as an atom instead.
      out.atoms.push_back({w.wrap(c.center), c.mass});
      continue;
    }
    const double norm = c.mass / (sum * cv);
    for (std::size_t idx = 0; idx < vals.size(); ++idx)
      density.values[idx] += vals[idx] * norm;
  }
  if (out.has_density) out.density = std::move(density);
  return out;
}

PointConfig diffuse_config(double t, const Window& w, const PointConfig& phi,
                           RngStream& rng) {
  require_torus(w);
  if (!(t > 0.0 && t <= 1.0))
    throw std::invalid_argument("diffuse_config: t must be in (0,1]");
  if (t == 1.0) return phi;
  const double sd = std::sqrt(-std::log(t));
  PointConfig out;
  for (const PointConfig::Point& p : phi.points)
    for (std::uint64_t u = 0; u < p.mult; ++u) {
      std::vector<double> x = p.x;
      for (double& xi : x) xi += sd * rng.normal();
      out.add(w.wrap(x), 1);
    }
  return out;
}

PointConfig thin_diffuse_config(double t, const Window& w,
                                const PointConfig& phi, RngStream& rng) {
  require_torus(w);
  if (!(t > 0.0 && t <= 1.0))
    throw std::invalid_argument("thin_diffuse_config: t must be in (0,1]");
  if (t == 1.0) return phi;
  const double sd = std::sqrt(-std::log(t));
  PointConfig out;
  for (const PointConfig::Point& p : phi.points) {
    const std::uint64_t kept = rng.binomial(p.mult, t);
    for (std::uint64_t u = 0; u < kept; ++u) {
      std::vector<double> x = p.x;
      for (double& xi : x) xi += sd * rng.normal();
      out.add(w.wrap(x), 1);
    }
  }
  return out;
}

GaussMixMeasure measure_op_dt(double t, const GaussMixMeasure& mu) {
  if (!(t > 0.0 && t <= 1.0))
    throw std::invalid_argument("measure_op_dt: t must be in (0,1]");
  GaussMixMeasure out = mu;
  const double dv = -std::log(t);
  for (GaussMixMeasure::Component& c : out.components) {
    c.mass *= t;
    c.variance += dv;
  }
  return out;
}

RadialShapeDecomp spectral_decompose(const GaussMixMeasure& mu) {
  if (mu.components.empty() || mu.total_mass() <= 0.0)
    throw std::invalid_argument("spectral_decompose: zero measure");
  double vmin = std::numeric_limits<double>::infinity();
  for (const GaussMixMeasure::Component& c : mu.components)
    vmin = std::min(vmin, c.variance);
  RadialShapeDecomp d;
  d.radial = std::exp(-vmin);
  d.shape = mu;
  for (GaussMixMeasure::Component& c : d.shape.components) {
    c.mass /= d.radial;
    c.variance -= vmin;
  }
  return d;
}

double one_sided_stable_sample(double alpha, RngStream& rng) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("one_sided_stable_sample: alpha in (0,1)");
  // Kanter: S = (a(U)/E)^{(1-alpha)/alpha}, U ~ U(0,pi), E ~ Exp(1), with
  // a(u) = sin(alpha u)^{alpha/(1-alpha)} sin((1-alpha)u) / sin(u)^{1/(1-alpha)}.
  const double u = rng.uniform(0.0, std::numbers::pi);
  const double e = rng.exponential();
  const double log_a = (alpha / (1.0 - alpha)) * std::log(std::sin(alpha * u)) +
                       std::log(std::sin((1.0 - alpha) * u)) -
                       (1.0 / (1.0 - alpha)) * std::log(std::sin(u));
  return std::exp(((1.0 - alpha) / alpha) * (log_a - std::log(e)));
}

IntensityMeasure stable_measure_sample(double alpha, double total_scale,
                                       const Window& w,
                                       const std::vector<int>& shape,
                                       RngStream& rng) {
  require_torus(w);
  if (!(total_scale > 0.0))
    throw std::invalid_argument("stable_measure_sample: total_scale > 0");
  const double s = one_sided_stable_sample(alpha, rng);
  IntensityMeasure out;
  out.has_density = true;
  out.density = GridFunction::constant(shape, total_scale * s);
  return out;
}

PointConfig dt_stable_pp_sample(double alpha, double total_scale,
                                const Window& w, const std::vector<int>& shape,
                                RngStream& rng) {
  const IntensityMeasure xi =
      stable_measure_sample(alpha, total_scale, w, shape, rng);
  return poisson_sample(w, xi, rng);
}

double radial_inverse_cdf(double alpha, double eps, double u) {
  const double top = std::pow(eps, -alpha);
  return std::pow(top - u * (top - 1.0), -1.0 / alpha);
}

GaussMixMeasure levy_radial_sample(
    double alpha,
    const std::vector<std::pair<double, std::vector<double>>>& shapes,
    double eps, RngStream& rng) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("levy_radial_sample: eps in (0,1)");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("levy_radial_sample: alpha in (0,1)");
  const double tail = std::pow(eps, -alpha) - 1.0;
  GaussMixMeasure out;
  for (const auto& [weight, center] : shapes) {
    if (!(weight > 0.0))
      throw std::invalid_argument("levy_radial_sample: weights > 0");
    const std::uint64_t n = rng.poisson(weight * tail);
    for (std::uint64_t i = 0; i < n; ++i) {
      const double t = radial_inverse_cdf(alpha, eps, rng.uniform());
      out.components.push_back({t, -std::log(t), center});
    }
  }
  return out;
}

}  // namespace branchstab
