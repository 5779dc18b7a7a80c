#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "branchstab/numerics.hpp"

using namespace branchstab;

TEST_CASE("regularized incomplete gamma against closed forms") {
  // P(1, x) = 1 - e^{-x}.
  for (double x : {0.1, 1.0, 3.0, 10.0})
    CHECK(num::gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-12));
  // P(1/2, x) = erf(sqrt(x)).
  for (double x : {0.25, 1.0, 4.0})
    CHECK(num::gamma_p(0.5, x) ==
          doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-12));
  CHECK(num::gamma_q(2.5, 1.5) == doctest::Approx(1.0 - num::gamma_p(2.5, 1.5)));
}

TEST_CASE("chi-square tail matches standard critical values") {
  CHECK(num::chi2_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(num::chi2_sf(18.307038053275146, 10) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(num::chi2_sf(0.0, 5) == 1.0);
}

TEST_CASE("Kolmogorov tail values") {
  // Q(1.2238...) ~ 0.1, Q(1.3581...) ~ 0.05 (classic table values).
  CHECK(num::kolmogorov_sf(1.22385) == doctest::Approx(0.1).epsilon(1e-3));
  CHECK(num::kolmogorov_sf(1.35810) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(num::kolmogorov_sf(1e-9) == 1.0);
}

TEST_CASE("normal tail") {
  CHECK(num::normal_sf(0.0) == doctest::Approx(0.5));
  CHECK(num::normal_sf(1.959963984540054) == doctest::Approx(0.025).epsilon(1e-9));
}

TEST_CASE("adaptive quadrature") {
  CHECK(num::integrate([](double x) { return x * x; }, 0.0, 1.0) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(num::integrate([](double x) { return std::sin(x); }, 0.0,
                       3.141592653589793) == doctest::Approx(2.0).epsilon(1e-12));
  // Integrable endpoint blow-up.
  CHECK(num::integrate([](double x) { return 1.0 / std::sqrt(x); }, 1e-12, 1.0) ==
        doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("autonomous ODE solver") {
  // dy/ds = -y  =>  y(s) = e^{-s}.
  CHECK(num::solve_ode([](double y) { return -y; }, 1.0, 3.0) ==
        doctest::Approx(std::exp(-3.0)).epsilon(1e-8));
  // Logistic: dy/ds = y(1-y), y(0)=0.1.
  const double y = num::solve_ode([](double v) { return v * (1.0 - v); }, 0.1, 2.0);
  const double exact = 1.0 / (1.0 + 9.0 * std::exp(-2.0));
  CHECK(y == doctest::Approx(exact).epsilon(1e-8));
  CHECK(num::solve_ode([](double v) { return -v; }, 0.7, 0.0) == 0.7);
}
