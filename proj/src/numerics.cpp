#include "branchstab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace branchstab::num {

namespace {

double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p domain");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * x);
}

double kolmogorov_sf(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

namespace {

// Gauss-Kronrod 15/7 nodes and weights on [-1,1].
constexpr double kGkNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kGkWk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kGkWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct GkResult {
  double value;
  double err;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kGkNodes[i]);
    fv[14 - i] = f(c + h * kGkNodes[i]);
  }
  fv[7] = f(c);
  double kron = kGkWk[7] * fv[7];
  double gauss = kGkWg[3] * fv[7];
  for (int i = 0; i < 7; ++i) kron += kGkWk[i] * (fv[i] + fv[14 - i]);
  for (int i = 0; i < 3; ++i)
    gauss += kGkWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  return {kron * h, std::fabs(kron - gauss) * h};
}

void adapt(const std::function<double(double)>& f, double a, double b,
           double tol, int depth, double& acc, double& err_acc) {
  const GkResult r = gk15(f, a, b);
  if (r.err <= tol || depth >= 48) {
    acc += r.value;
    err_acc += r.err;
    return;
  }
  const double m = 0.5 * (a + b);
  adapt(f, a, m, 0.5 * tol, depth + 1, acc, err_acc);
  adapt(f, m, b, 0.5 * tol, depth + 1, acc, err_acc);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol) {
  if (a == b) return 0.0;
  const GkResult whole = gk15(f, a, b);
  const double tol = std::max(abs_tol, rel_tol * std::fabs(whole.value));
  double acc = 0.0, err = 0.0;
  adapt(f, a, b, tol, 0, acc, err);
  if (err > 10.0 * std::max(abs_tol, rel_tol * std::fabs(acc)) + 1e-300)
    throw std::runtime_error("integrate: tolerance not met, error estimate " +
                             std::to_string(err));
  return acc;
}

double solve_ode(const std::function<double(double)>& f, double y0, double s,
                 double rel_tol) {
  if (s == 0.0) return y0;
  // Cash-Karp embedded 4(5) pair.
  static constexpr double b21 = 0.2;
  static constexpr double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
  static constexpr double b41 = 0.3, b42 = -0.9, b43 = 1.2;
  static constexpr double b51 = -11.0 / 54.0, b52 = 2.5, b53 = -70.0 / 27.0,
                          b54 = 35.0 / 27.0;
  static constexpr double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0,
                          b63 = 575.0 / 13824.0, b64 = 44275.0 / 110592.0,
                          b65 = 253.0 / 4096.0;
  static constexpr double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0,
                          c4 = 125.0 / 594.0, c6 = 512.0 / 1771.0;
  static constexpr double d1 = c1 - 2825.0 / 27648.0, d3 = c3 - 18575.0 / 48384.0,
                          d4 = c4 - 13525.0 / 55296.0, d5 = -277.0 / 14336.0,
                          d6 = c6 - 0.25;
  double t = 0.0;
  double y = y0;
  double h = std::min(0.1, s);
  int steps = 0;
  while (t < s) {
    if (++steps > 200000)
      throw std::runtime_error("solve_ode: step limit exceeded");
    if (t + h > s) h = s - t;
    const double k1 = f(y);
    const double k2 = f(y + h * b21 * k1);
    const double k3 = f(y + h * (b31 * k1 + b32 * k2));
    const double k4 = f(y + h * (b41 * k1 + b42 * k2 + b43 * k3));
    const double k5 = f(y + h * (b51 * k1 + b52 * k2 + b53 * k3 + b54 * k4));
    const double k6 =
        f(y + h * (b61 * k1 + b62 * k2 + b63 * k3 + b64 * k4 + b65 * k5));
    const double dy = h * (c1 * k1 + c3 * k3 + c4 * k4 + c6 * k6);
    const double err =
        std::fabs(h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6));
    const double scale = rel_tol * std::max({std::fabs(y), std::fabs(y + dy), 1e-6});
    if (err <= scale) {
      t += h;
      y += dy;
      h *= std::min(5.0, 0.9 * std::pow(scale / std::max(err, 1e-300), 0.2));
    } else {
      h *= std::max(0.1, 0.9 * std::pow(scale / err, 0.25));
      if (h < 1e-14)
        throw std::runtime_error("solve_ode: step size underflow, local error " +
                                 std::to_string(err));
    }
  }
  return y;
}

}  // namespace branchstab::num
