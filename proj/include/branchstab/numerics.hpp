#pragma once

#include <functional>

namespace branchstab::num {

/// Regularized lower incomplete gamma P(a,x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a,x) = 1 - P(a,x).
double gamma_q(double a, double x);

/// Upper tail of the chi-square distribution with dof degrees of freedom.
double chi2_sf(double x, double dof);

/// Kolmogorov distribution tail Q_KS(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_sf(double lambda);

/// Standard normal upper tail.
double normal_sf(double z);

/// Adaptive Gauss-Kronrod (15 point) quadrature of f over [a,b].
/// Throws std::runtime_error with the achieved error if rel_tol cannot be met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 1e-14);

/// Integrates dy/ds = f(y) from y(0)=y0 to s with an adaptive Cash-Karp
/// Runge-Kutta pair.  Throws std::runtime_error if step control fails.
double solve_ode(const std::function<double(double)>& f, double y0, double s,
                 double rel_tol = 1e-9);

}  // namespace branchstab::num
