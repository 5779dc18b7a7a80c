#include "branchstab/processes.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace branchstab {

double Window::volume() const {
  double v = 1.0;
  for (double s : sides) v *= s;
  return v;
}

bool Window::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (x[i] < 0.0 || x[i] > sides[i]) return false;
  return true;
}

std::vector<double> Window::wrap(std::span<const double> x) const {
  std::vector<double> out(x.begin(), x.end());
  if (kind != Kind::Torus) return out;
  for (int i = 0; i < dim(); ++i) {
    out[i] = std::fmod(out[i], sides[i]);
    if (out[i] < 0.0) out[i] += sides[i];
  }
  return out;
}

std::uint64_t PointConfig::total() const {
  std::uint64_t t = 0;
  for (const Point& p : points) t += p.mult;
  return t;
}

void PointConfig::add(std::vector<double> x, std::uint64_t mult) {
  if (mult == 0) return;
  points.push_back(Point{std::move(x), mult});
}

PointConfig& PointConfig::operator+=(const PointConfig& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  return *this;
}

GridFunction GridFunction::constant(const std::vector<int>& shape, double v) {
  std::size_t n = 1;
  for (int s : shape) {
    if (s <= 0) throw std::invalid_argument("grid shape must be positive");
    n *= static_cast<std::size_t>(s);
  }
  return GridFunction{shape, std::vector<double>(n, v)};
}

std::size_t GridFunction::cell_of(const Window& w,
                                  std::span<const double> x) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    const double frac = x[i] / w.sides[i];
    int c = static_cast<int>(frac * shape[i]);
    c = std::clamp(c, 0, shape[i] - 1);
    idx = idx * static_cast<std::size_t>(shape[i]) + static_cast<std::size_t>(c);
  }
  return idx;
}

double GridFunction::operator()(const Window& w,
                                std::span<const double> x) const {
  return values[cell_of(w, x)];
}

double GridFunction::cell_volume(const Window& w) const {
  double v = w.volume();
  for (int s : shape) v /= s;
  return v;
}

GridFunction GridFunction::map(const std::function<double(double)>& f) const {
  GridFunction out{shape, values};
  for (double& v : out.values) v = f(v);
  return out;
}

double GridFunction::integral(const Window& w) const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * cell_volume(w);
}

double IntensityMeasure::total_mass(const Window& w) const {
  double m = 0.0;
  for (const Atom& a : atoms) m += a.mass;
  if (has_density) m += density.integral(w);
  return m;
}

IntensityMeasure IntensityMeasure::scaled(double factor) const {
  IntensityMeasure out = *this;
  for (Atom& a : out.atoms) a.mass *= factor;
  if (out.has_density)
    for (double& v : out.density.values) v *= factor;
  return out;
}

double IntensityMeasure::integrate(const Window& w, const GridFunction& f) const {
  double sum = 0.0;
  for (const Atom& a : atoms) sum += a.mass * f(w, a.x);
  if (has_density) {
    if (f.shape == density.shape) {
      const double cv = density.cell_volume(w);
      for (std::size_t i = 0; i < density.values.size(); ++i)
        sum += density.values[i] * f.values[i] * cv;
    } else {
      // Both factors are piecewise constant; integrate exactly on the common
      // refinement grid (per-dimension lcm of the two resolutions).
      const std::size_t d = density.shape.size();
      if (f.shape.size() != d)
        throw std::invalid_argument("integrate: dimension mismatch");
      std::vector<int> fine(d);
      std::size_t cells = 1;
      for (std::size_t i = 0; i < d; ++i) {
        fine[i] = std::lcm(f.shape[i], density.shape[i]);
        cells *= static_cast<std::size_t>(fine[i]);
      }
      if (cells > (std::size_t{1} << 22))
        throw std::invalid_argument("integrate: refinement grid too large");
      double cv = w.volume();
      for (int s : fine) cv /= s;
      std::vector<double> x(d);
      for (std::size_t idx = 0; idx < cells; ++idx) {
        std::size_t rest = idx;
        for (std::size_t i = d; i-- > 0;) {
          const auto c = rest % static_cast<std::size_t>(fine[i]);
          rest /= static_cast<std::size_t>(fine[i]);
          x[i] = (static_cast<double>(c) + 0.5) * w.sides[i] / fine[i];
        }
        sum += density(w, x) * f(w, x) * cv;
      }
    }
  }
  return sum;
}

namespace {

// Uniform location inside grid cell `idx` (row-major).
std::vector<double> uniform_in_cell(const Window& w, const GridFunction& g,
                                    std::size_t idx, RngStream& rng) {
  const int d = w.dim();
  std::vector<double> x(static_cast<std::size_t>(d));
  for (int i = d - 1; i >= 0; --i) {
    const int s = g.shape[static_cast<std::size_t>(i)];
    const auto c = idx % static_cast<std::size_t>(s);
    idx /= static_cast<std::size_t>(s);
    const double cell_len = w.sides[static_cast<std::size_t>(i)] / s;
    x[static_cast<std::size_t>(i)] =
        (static_cast<double>(c) + rng.uniform()) * cell_len;
  }
  return x;
}

}  // namespace

std::vector<double> IntensityMeasure::sample_location(const Window& w,
                                                      RngStream& rng) const {
  const double total = total_mass(w);
  if (total <= 0.0)
    throw std::invalid_argument("cannot sample from a zero measure");
  double u = rng.uniform() * total;
  for (const Atom& a : atoms) {
    u -= a.mass;
    if (u <= 0.0) return a.x;
  }
  const double cv = density.cell_volume(w);
  for (std::size_t i = 0; i < density.values.size(); ++i) {
    u -= density.values[i] * cv;
    if (u <= 0.0) return uniform_in_cell(w, density, i, rng);
  }
  // Round-off fallthrough: last positive cell.
  for (std::size_t i = density.values.size(); i-- > 0;)
    if (density.values[i] > 0.0) return uniform_in_cell(w, density, i, rng);
  return atoms.back().x;
}

PointConfig poisson_sample(const Window& w, const IntensityMeasure& mu,
                           RngStream& rng) {
  PointConfig cfg;
  for (const IntensityMeasure::Atom& a : mu.atoms) {
    const std::uint64_t n = rng.poisson(a.mass);
    if (n > 0) cfg.add(a.x, n);
  }
  if (mu.has_density) {
    const double cv = mu.density.cell_volume(w);
    for (std::size_t i = 0; i < mu.density.values.size(); ++i) {
      const double mean = mu.density.values[i] * cv;
      if (mean <= 0.0) continue;
      const std::uint64_t n = rng.poisson(mean);
      for (std::uint64_t k = 0; k < n; ++k)
        cfg.add(uniform_in_cell(w, mu.density, i, rng), 1);
    }
  }
  return cfg;
}

PointConfig cox_sample(const Window& w, const MeasureSampler& measure_sampler,
                       RngStream& rng) {
  const IntensityMeasure xi = measure_sampler(rng);
  return poisson_sample(w, xi, rng);
}

PointConfig cluster_compose(const Window& w, const PointConfig& center,
                            const ComponentSampler& component, RngStream& rng) {
  PointConfig out;
  for (const PointConfig::Point& p : center.points)
    for (std::uint64_t u = 0; u < p.mult; ++u) out += component(p.x, rng);
  (void)w;
  return out;
}

double log_pgfl_weight(const Window& w, const PointConfig& c,
                       const TestFunction& h) {
  double lw = 0.0;
  for (const PointConfig::Point& p : c.points) {
    const double v = h(w, p.x);
    if (v <= 0.0) return -std::numeric_limits<double>::infinity();
    lw += static_cast<double>(p.mult) * std::log(v);
  }
  return lw;
}

namespace {

MCEstimate mean_and_se(const std::vector<double>& vals) {
  const double n = static_cast<double>(vals.size());
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  const double var = vals.size() > 1 ? ss / (n - 1.0) : 0.0;
  return MCEstimate{mean, std::sqrt(var / n)};
}

}  // namespace

MCEstimate empirical_pgfl(const Window& w,
                          const std::function<PointConfig(RngStream&)>& sampler,
                          const TestFunction& h, std::size_t n,
                          StreamFamily streams, int workers) {
  std::vector<double> vals(n);
  parallel_for(n, workers, [&](std::uint64_t i) {
    RngStream rng = streams.stream(i);
    vals[i] = std::exp(log_pgfl_weight(w, sampler(rng), h));
  });
  return mean_and_se(vals);
}

MCEstimate empirical_laplace(const Window& w, const MeasureSampler& sampler,
                             const GridFunction& u, std::size_t n,
                             StreamFamily streams, int workers) {
  std::vector<double> vals(n);
  parallel_for(n, workers, [&](std::uint64_t i) {
    RngStream rng = streams.stream(i);
    const IntensityMeasure xi = sampler(rng);
    vals[i] = std::exp(-xi.integrate(w, u));
  });
  return mean_and_se(vals);
}

}  // namespace branchstab
