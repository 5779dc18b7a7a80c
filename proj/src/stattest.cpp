#include "branchstab/stattest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "branchstab/numerics.hpp"

namespace branchstab {

TestReport TestReport::make(std::string name, double statistic, double p_value,
                            std::size_t n_a, std::size_t n_b, std::uint64_t seed,
                            double alpha_level, std::string detail) {
  TestReport r;
  r.name = std::move(name);
  r.statistic = statistic;
  r.p_value = p_value;
  r.n_a = n_a;
  r.n_b = n_b;
  r.seed = seed;
  r.alpha_level = alpha_level;
  r.pass = p_value > alpha_level;
  r.detail = std::move(detail);
  return r;
}

namespace {

double ks_p_value(double d, double n_a, double n_b) {
  const double ne = n_a * n_b / (n_a + n_b);
  const double sq = std::sqrt(ne);
  return num::kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d);
}

/// Two-sample KS statistic over sorted copies of a and b.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  return d;
}

struct ChiSquare {
  double statistic = 0.0;
  double p = 1.0;
  int bins = 0;
};

/// Two-sample chi-square on pooled count histograms, merging adjacent value
/// bins (in increasing order) until every pooled expected count is >= 5.
ChiSquare chi_square_counts(std::span<const std::uint64_t> a,
                            std::span<const std::uint64_t> b) {
  std::map<std::uint64_t, std::pair<double, double>> hist;
  for (std::uint64_t v : a) hist[v].first += 1.0;
  for (std::uint64_t v : b) hist[v].second += 1.0;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double tot = na + nb;
  // Expected pooled cell count threshold applied to the smaller side.
  const double scale = std::min(na, nb) / tot;
  std::vector<std::pair<double, double>> bins;
  double ca = 0.0, cb = 0.0;
  for (const auto& [v, counts] : hist) {
    ca += counts.first;
    cb += counts.second;
    if ((ca + cb) * scale >= 5.0) {
      bins.push_back({ca, cb});
      ca = cb = 0.0;
    }
  }
  if (ca + cb > 0.0) {
    if (!bins.empty()) {
      bins.back().first += ca;
      bins.back().second += cb;
    } else {
      bins.push_back({ca, cb});
    }
  }
  ChiSquare out;
  out.bins = static_cast<int>(bins.size());
  if (bins.size() < 2) return out;  // degenerate: identical constants
  for (const auto& [oa, ob] : bins) {
    const double ea = na * (oa + ob) / tot;
    const double eb = nb * (oa + ob) / tot;
    out.statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  out.p = num::chi2_sf(out.statistic, static_cast<double>(bins.size() - 1));
  return out;
}

}  // namespace

TestReport two_sample_counts(const std::string& name,
                             std::span<const std::uint64_t> a,
                             std::span<const std::uint64_t> b,
                             double alpha_level, std::uint64_t seed) {
  if (a.size() < 1000 || b.size() < 1000)
    throw std::invalid_argument(name + ": need >= 1000 samples per side");
  const ChiSquare chi = chi_square_counts(a, b);
  std::vector<double> da(a.begin(), a.end()), db(b.begin(), b.end());
  const double d = ks_statistic(std::move(da), std::move(db));
  const double p_ks = ks_p_value(d, static_cast<double>(a.size()),
                                 static_cast<double>(b.size()));
  const double p = std::min(1.0, 2.0 * std::min(chi.p, p_ks));
  return TestReport::make(
      name, std::max(chi.statistic, d), p, a.size(), b.size(), seed,
      alpha_level,
      "chi2=" + std::to_string(chi.statistic) + " (" +
          std::to_string(chi.bins) + " bins, p=" + std::to_string(chi.p) +
          "), ks_d=" + std::to_string(d) + " (p=" + std::to_string(p_ks) + ")");
}

TestReport two_sample_reals(const std::string& name, std::span<const double> a,
                            std::span<const double> b, double alpha_level,
                            std::uint64_t seed) {
  if (a.size() < 1000 || b.size() < 1000)
    throw std::invalid_argument(name + ": need >= 1000 samples per side");
  std::vector<double> pa, pb;
  std::size_t za = 0, zb = 0;
  for (double v : a) {
    if (v == 0.0)
      ++za;
    else
      pa.push_back(v);
  }
  for (double v : b) {
    if (v == 0.0)
      ++zb;
    else
      pb.push_back(v);
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());

  double p_zero = 1.0;
  bool zero_split = (za + zb) > 0 && (za + zb) < a.size() + b.size();
  if (zero_split) {
    const double pooled = (za + zb) / (na + nb);
    const double se =
        std::sqrt(pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb));
    const double z = (za / na - zb / nb) / se;
    p_zero = 2.0 * num::normal_sf(std::fabs(z));
  }
  double p_ks = 1.0;
  double d = 0.0;
  if (!pa.empty() && !pb.empty()) {
    d = ks_statistic(pa, pb);
    p_ks = ks_p_value(d, static_cast<double>(pa.size()),
                      static_cast<double>(pb.size()));
  }
  const double p = zero_split ? std::min(1.0, 2.0 * std::min(p_zero, p_ks))
                              : p_ks;
  return TestReport::make(
      name, d, p, a.size(), b.size(), seed, alpha_level,
      "zero_atoms=(" + std::to_string(za) + "," + std::to_string(zb) +
          ", p=" + std::to_string(p_zero) + "), ks_d=" + std::to_string(d) +
          " (p=" + std::to_string(p_ks) + ")");
}

std::size_t CellPartition::cell_count() const {
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  return n;
}

std::size_t CellPartition::cell_index(const Window& w,
                                      std::span<const double> x) const {
  GridFunction g;
  g.shape = shape;
  return g.cell_of(w, x);
}

std::vector<std::uint64_t> CellPartition::counts(const Window& w,
                                                 const PointConfig& c) const {
  std::vector<std::uint64_t> out(cell_count(), 0);
  for (const PointConfig::Point& p : c.points)
    out[cell_index(w, p.x)] += p.mult;
  return out;
}

TestReport pp_equality_test(const std::string& name, const Window& w,
                            const ConfigSampler& sampler_a,
                            const ConfigSampler& sampler_b,
                            const CellPartition& part, std::size_t n,
                            StreamFamily streams, double alpha_level,
                            int workers) {
  if (n < 10000)
    throw std::invalid_argument(name + ": need >= 1e4 replicates");
  const std::size_t k = part.cell_count();
  if (k < 2) throw std::invalid_argument(name + ": need >= 2 cells");
  std::vector<std::uint64_t> cell_a(n * k), cell_b(n * k);
  std::vector<std::uint64_t> tot_a(n), tot_b(n);
  parallel_for(n, workers, [&](std::uint64_t i) {
    RngStream ra = streams.block(0).stream(i);
    const auto ca = part.counts(w, sampler_a(ra));
    RngStream rb = streams.block(1).stream(i);
    const auto cb = part.counts(w, sampler_b(rb));
    for (std::size_t c = 0; c < k; ++c) {
      cell_a[i * k + c] = ca[c];
      cell_b[i * k + c] = cb[c];
      tot_a[i] += ca[c];
      tot_b[i] += cb[c];
    }
  });
  // One count test per cell plus the total, Bonferroni over k+1 tests.
  double min_p = 1.0;
  double worst_stat = 0.0;
  std::string worst = "total";
  std::vector<std::uint64_t> va(n), vb(n);
  for (std::size_t c = 0; c <= k; ++c) {
    if (c < k) {
      for (std::size_t i = 0; i < n; ++i) {
        va[i] = cell_a[i * k + c];
        vb[i] = cell_b[i * k + c];
      }
    } else {
      va = tot_a;
      vb = tot_b;
    }
    const TestReport r = two_sample_counts(
        name + (c < k ? "/cell" + std::to_string(c) : "/total"), va, vb,
        alpha_level, streams.seed);
    if (r.p_value < min_p) {
      min_p = r.p_value;
      worst_stat = r.statistic;
      worst = c < k ? "cell " + std::to_string(c) : "total";
    }
  }
  const double p = std::min(1.0, static_cast<double>(k + 1) * min_p);
  return TestReport::make(name, worst_stat, p, n, n, streams.seed, alpha_level,
                          "worst component: " + worst +
                              " (raw p=" + std::to_string(min_p) + ", " +
                              std::to_string(k + 1) + " tests)");
}

TestReport transform_band_test(const std::string& name,
                               std::span<const MCEstimate> estimates,
                               std::span<const double> targets,
                               double alpha_level, std::uint64_t seed) {
  if (estimates.size() != targets.size())
    throw std::invalid_argument(name + ": estimate/target length mismatch");
  if (estimates.empty())
    throw std::invalid_argument(name + ": no estimates");
  double max_dev = 0.0;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (!(estimates[i].se > 0.0))
      throw std::invalid_argument(name + ": standard errors must be > 0");
    const double dev = std::fabs(estimates[i].value - targets[i]) /
                       estimates[i].se;
    if (dev > max_dev) {
      max_dev = dev;
      worst = i;
    }
  }
  const double m = static_cast<double>(estimates.size());
  // Equivalent significance level of the 3-standard-error band, so the
  // report invariant (pass iff p > alpha) encodes the band rule exactly.
  const double level = std::min(1.0, m * 2.0 * num::normal_sf(3.0));
  const double p = std::min(1.0, m * 2.0 * num::normal_sf(max_dev));
  TestReport r = TestReport::make(
      name, max_dev, p, estimates.size(), estimates.size(), seed, level,
      "worst point " + std::to_string(worst) + ": estimate " +
          std::to_string(estimates[worst].value) + " vs target " +
          std::to_string(targets[worst]) + " (" + std::to_string(max_dev) +
          " se); configured level " + std::to_string(alpha_level) +
          " mapped to the 3-se band");
  r.pass = max_dev <= 3.0;
  return r;
}

}  // namespace branchstab
