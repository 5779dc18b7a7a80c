#include "branchstab/semigroups.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "branchstab/numerics.hpp"
#include "branchstab/stattest.hpp"

namespace branchstab {

namespace {

// Saturating cap for particle counts; far above anything statistically
// observable but keeps arithmetic safe against overflow.
constexpr std::uint64_t kCountCap = std::uint64_t{1} << 62;

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t s = a + b;
  return (s < a || s > kCountCap) ? kCountCap : s;
}

/// Draws 1 + Geometric(number of failures) with success probability p.
std::uint64_t shifted_geometric(double p, RngStream& rng) {
  if (p >= 1.0) return 1;
  const double u = rng.uniform();
  const double k = std::floor(std::log(u) / std::log1p(-p));
  if (!(k < 9.0e18)) return kCountCap;
  return 1 + static_cast<std::uint64_t>(k);
}

}  // namespace

double OffspringLaw::mean() const {
  double m = 0.0;
  for (const auto& [k, p] : probs) m += k * p;
  return m;
}

double OffspringLaw::pgf(double z) const {
  double g = 0.0;
  for (const auto& [k, p] : probs) g += p * std::pow(z, k);
  return g;
}

int OffspringLaw::sample(RngStream& rng) const {
  double u = rng.uniform();
  for (const auto& [k, p] : probs) {
    u -= p;
    if (u <= 0.0) return k;
  }
  return probs.back().first;
}

OffspringLaw OffspringLaw::normalised(std::vector<std::pair<int, double>> probs) {
  double sum = 0.0;
  double m = 0.0;
  for (const auto& [k, p] : probs) {
    if (k < 0) throw std::invalid_argument("offspring count must be >= 0");
    if (p < 0.0) throw std::invalid_argument("offspring probability must be >= 0");
    if (k == 1 && p > 0.0)
      throw std::invalid_argument(
          "p_1 must be 0: a single-child branch event is unobservable in law");
    sum += p;
    m += k * p;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("offspring probabilities must sum to 1, got " +
                                std::to_string(sum));
  if (m >= 1.0)
    throw std::invalid_argument("offspring mean must be < 1 (subcritical), got " +
                                std::to_string(m));
  OffspringLaw law;
  law.probs = std::move(probs);
  law.branch_rate = 1.0 / (1.0 - m);
  return law;
}

std::uint64_t YaglomLaw::sample(RngStream& rng) const {
  switch (rep) {
    case Rep::Constant:
      return 1;
    case Rep::ShiftedGeometric:
      return shifted_geometric(p, rng);
    case Rep::Empirical: {
      double u = rng.uniform();
      for (std::size_t k = 0; k < pmf.size(); ++k) {
        u -= pmf[k];
        if (u <= 0.0) return k + 1;
      }
      return pmf.size();  // tail mass folded into the cutoff
    }
  }
  return 1;
}

std::uint64_t YaglomLaw::sample_sum(std::uint64_t n, RngStream& rng) const {
  if (n == 0) return 0;
  switch (rep) {
    case Rep::Constant:
      return std::min(n, std::uint64_t{1} << 62);
    case Rep::ShiftedGeometric: {
      if (p >= 1.0) return n;
      // Sum of n shifted geometrics = n + NegBin(n, 1-p), and
      // NegBin(n, q) is Poisson mixed over Gamma(n, q/(1-q)).
      const double q = 1.0 - p;
      const double mix = rng.gamma(static_cast<double>(n), q / (1.0 - q));
      return sat_add(n, rng.poisson(mix));
    }
    case Rep::Empirical: {
      if (n < 4096) {
        std::uint64_t s = 0;
        for (std::uint64_t i = 0; i < n; ++i) s = sat_add(s, sample(rng));
        return s;
      }
      // Multinomial split over the pmf support via sequential binomials.
      std::uint64_t s = 0;
      std::uint64_t left = n;
      double mass_left = 1.0;
      for (std::size_t k = 0; k < pmf.size() && left > 0; ++k) {
        const double pk = std::clamp(pmf[k] / mass_left, 0.0, 1.0);
        const std::uint64_t cnt = rng.binomial(left, pk);
        const std::uint64_t val = k + 1;
        s = cnt > kCountCap / val ? kCountCap : sat_add(s, cnt * val);
        left -= cnt;
        mass_left -= pmf[k];
      }
      s = sat_add(s, left * pmf.size());
      return s;
    }
  }
  return n;
}

double YaglomLaw::pgf(double z) const {
  switch (rep) {
    case Rep::Constant:
      return z;
    case Rep::ShiftedGeometric:
      return p * z / (1.0 - (1.0 - p) * z);
    case Rep::Empirical: {
      double g = 0.0;
      double zk = 1.0;
      for (std::size_t k = 0; k < pmf.size(); ++k) {
        zk *= z;
        g += pmf[k] * zk;
      }
      g += tail_mass * zk;
      return g;
    }
  }
  return z;
}

BranchingSemigroup BranchingSemigroup::pure_death() {
  BranchingSemigroup sg;
  sg.kind_ = Kind::PureDeath;
  sg.law_ = OffspringLaw::normalised({{0, 1.0}});
  return sg;
}

BranchingSemigroup BranchingSemigroup::linear_birth_death(double lambda) {
  if (lambda <= 0.0)
    throw std::invalid_argument("linear_birth_death: lambda must be > 0");
  BranchingSemigroup sg;
  sg.kind_ = Kind::LinearBirthDeath;
  sg.lambda_ = lambda;
  // Death rate mu = lambda + 1 makes the one-particle mean exactly e^{-s}.
  const double mu = lambda + 1.0;
  sg.law_ = OffspringLaw::normalised(
      {{0, mu / (lambda + mu)}, {2, lambda / (lambda + mu)}});
  return sg;
}

BranchingSemigroup BranchingSemigroup::general(OffspringLaw law) {
  BranchingSemigroup sg;
  sg.kind_ = Kind::General;
  sg.law_ = std::move(law);
  return sg;
}

double BranchingSemigroup::U(double z) const {
  return law_.branch_rate * (law_.pgf(z) - z);
}

double BranchingSemigroup::F(double s, double z) const {
  if (s < 0.0) throw std::invalid_argument("F: s must be >= 0");
  if (z < 0.0 || z > 1.0) throw std::invalid_argument("F: z must be in [0,1]");
  if (s == 0.0) return z;
  const double u = std::exp(-s);
  switch (kind_) {
    case Kind::PureDeath:
      return 1.0 - u + u * z;
    case Kind::LinearBirthDeath:
      return 1.0 - u * (1.0 - z) / (1.0 + lambda_ * (1.0 - u) * (1.0 - z));
    case Kind::General: {
      const double y =
          num::solve_ode([this](double f) { return U(f); }, z, s, 1e-12);
      return std::clamp(y, 0.0, 1.0);
    }
  }
  return z;
}

double BranchingSemigroup::A(double z) const {
  if (z < 0.0 || z > 1.0) throw std::invalid_argument("A: z must be in [0,1]");
  switch (kind_) {
    case Kind::PureDeath:
      return 1.0 - z;
    case Kind::LinearBirthDeath:
      return (lambda_ + 1.0) * (1.0 - z) / (1.0 + lambda_ * (1.0 - z));
    case Kind::General: {
      if (z == 0.0) return 1.0;
      if (z == 1.0) return 0.0;
      // The rate normalisation makes U(x) = (1-x)(1 + O(1-x)) near 1, so
      // the integral of 1/U carries a -log(1-z) part.  Subtracting it keeps
      // the quadrature integrand smooth up to the boundary:
      //   A(z) = (1-z) exp{-int_0^z [1/U(x) - 1/(1-x)] dx}.
      const auto smooth = [this](double x) {
        const double w = 1.0 - x;
        if (w < 1e-9) {
          // Removable singularity: limit is -U''(1)/(2 U'(1)^2) scaled.
          double curv = 0.0;
          for (const auto& [k, p] : law_.probs)
            curv += p * static_cast<double>(k) * static_cast<double>(k - 1);
          return -0.5 * law_.branch_rate * curv;
        }
        // U(x) via w-expansion to avoid cancellation in g(x) - x.
        double gm1 = 0.0;  // g(1-w) - 1
        for (const auto& [k, p] : law_.probs)
          gm1 += p * std::expm1(static_cast<double>(k) * std::log1p(-w));
        const double u = law_.branch_rate * (gm1 + w);
        return (w - u) / (u * w);
      };
      const double integral = num::integrate(smooth, 0.0, z, 1e-11);
      return (1.0 - z) * std::exp(-integral);
    }
  }
  return 1.0 - z;
}

double BranchingSemigroup::B(double z) const { return 1.0 - A(z); }

namespace {

/// Population of a single branching chain advanced by Gillespie steps until
/// `horizon`; returns the state at the horizon (0 if extinct before it).
std::uint64_t gillespie_to(const OffspringLaw& law, std::uint64_t n,
                           double horizon, RngStream& rng) {
  double t = 0.0;
  while (n > 0) {
    t += rng.exponential(1.0 / (law.branch_rate * static_cast<double>(n)));
    if (t > horizon) break;
    const int off = law.sample(rng);
    n = n - 1 + static_cast<std::uint64_t>(off);
  }
  return n;
}

std::vector<double> pmf_of(const std::vector<std::uint64_t>& states, int cutoff,
                           double* tail) {
  std::vector<double> pmf(static_cast<std::size_t>(cutoff), 0.0);
  double tail_mass = 0.0;
  std::size_t alive = 0;
  for (std::uint64_t s : states) {
    if (s == 0) continue;
    ++alive;
    if (s <= static_cast<std::uint64_t>(cutoff))
      pmf[s - 1] += 1.0;
    else
      tail_mass += 1.0;
  }
  if (alive > 0) {
    for (double& v : pmf) v /= static_cast<double>(alive);
    tail_mass /= static_cast<double>(alive);
  }
  if (tail) *tail = tail_mass;
  return pmf;
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::fabs(a[i] - b[i]);
  return 0.5 * d;
}

}  // namespace

YaglomLaw BranchingSemigroup::yaglom(int cutoff, double s_max, RngStream& rng,
                                     int chains) const {
  if (cutoff < 1) throw std::invalid_argument("yaglom: cutoff must be >= 1");
  YaglomLaw law;
  switch (kind_) {
    case Kind::PureDeath:
      law.rep = YaglomLaw::Rep::Constant;
      return law;
    case Kind::LinearBirthDeath:
      law.rep = YaglomLaw::Rep::ShiftedGeometric;
      law.p = 1.0 / (1.0 + lambda_);
      return law;
    case Kind::General:
      break;
  }
  if (s_max <= 0.0) throw std::invalid_argument("yaglom: s_max must be > 0");
  // Conditioned particle system: an ensemble of chains evolves in time
  // slices; chains that die within a slice restart from the state of a
  // uniformly chosen surviving chain, which keeps the ensemble distributed
  // approximately as the process conditioned on survival.
  const double slice = 0.05;
  std::vector<std::uint64_t> states(static_cast<std::size_t>(chains), 1);
  std::vector<double> half_pmf;
  double half_tail = 0.0;
  double t = 0.0;
  while (t < s_max) {
    const double dt = std::min(slice, s_max - t);
    for (std::uint64_t& s : states) s = gillespie_to(law_, s, dt, rng);
    std::vector<std::uint32_t> alive;
    alive.reserve(states.size());
    for (std::uint32_t i = 0; i < states.size(); ++i)
      if (states[i] > 0) alive.push_back(i);
    if (alive.empty())
      throw std::runtime_error(
          "yaglom: all conditioned chains died in one slice; increase chains");
    for (std::uint64_t& s : states)
      if (s == 0) s = states[alive[rng.uniform_index(alive.size())]];
    t += dt;
    if (half_pmf.empty() && t >= 0.5 * s_max - 1e-12)
      half_pmf = pmf_of(states, cutoff, &half_tail);
  }
  law.rep = YaglomLaw::Rep::Empirical;
  law.pmf = pmf_of(states, cutoff, &law.tail_mass);
  law.diagnostic = tv_distance(law.pmf, half_pmf) + std::fabs(law.tail_mass - half_tail);
  if (law.diagnostic > 0.01)
    throw std::runtime_error(
        "yaglom: conditioned simulation not converged (diagnostic " +
        std::to_string(law.diagnostic) + " > 0.01); increase s_max");
  return law;
}

TestReport validate_conditions(const BranchingSemigroup& sg,
                               const std::vector<SemigroupGridPoint>& grid,
                               double tol) {
  if (grid.empty())
    throw std::invalid_argument("validate_conditions: empty grid");
  double worst = 0.0;
  std::string worst_what = "none";
  auto record = [&](double err, const std::string& what) {
    if (err > worst) {
      worst = err;
      worst_what = what;
    }
  };
  const double eps = 1e-5;
  const double s_small = tol / 10.0;
  const double s_large = 40.0;
  for (const SemigroupGridPoint& g : grid) {
    const double comp =
        std::fabs(sg.F(g.s + g.t, g.z) - sg.F(g.s, sg.F(g.t, g.z)));
    record(comp, "composition at (s=" + std::to_string(g.s) +
                     ", t=" + std::to_string(g.t) + ", z=" + std::to_string(g.z) + ")");
    // Second-order one-sided finite difference for F_s'(1).
    const double deriv = (3.0 * sg.F(g.s, 1.0) - 4.0 * sg.F(g.s, 1.0 - eps) +
                          sg.F(g.s, 1.0 - 2.0 * eps)) /
                         (2.0 * eps);
    record(std::fabs(deriv - std::exp(-g.s)),
           "mean identity at s=" + std::to_string(g.s));
    record(std::fabs(sg.F(s_small, g.z) - g.z),
           "small-s limit at z=" + std::to_string(g.z));
    record(std::fabs(sg.F(s_large, g.z) - 1.0),
           "large-s limit at z=" + std::to_string(g.z));
  }
  TestReport r = TestReport::make("semigroup_conditions", worst,
                                  worst <= tol ? 1.0 : 0.0, grid.size(),
                                  grid.size(), 0, 0.0,
                                  "worst violation: " + worst_what);
  r.pass = worst <= tol;
  return r;
}

}  // namespace branchstab
