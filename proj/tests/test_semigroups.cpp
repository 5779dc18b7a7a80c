#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "branchstab/rng.hpp"
#include "branchstab/semigroups.hpp"
#include "branchstab/stattest.hpp"

using namespace branchstab;

namespace {

// {p_0 = 0.75, p_2 = 0.25} is the offspring law of the binary birth-death
// chain with birth rate 0.5 (death rate 1.5, total rate 2), so that closed
// form is the oracle for the ODE path.
OffspringLaw binary_law() {
  return OffspringLaw::normalised({{0, 0.75}, {2, 0.25}});
}

std::vector<SemigroupGridPoint> default_grid() {
  std::vector<SemigroupGridPoint> g;
  for (double s : {0.1, 0.5, 1.0, 2.0, 4.0})
    for (double t : {0.1, 0.5, 1.0, 2.0, 4.0})
      for (double z : {0.0, 0.2, 0.45, 0.7, 0.95}) g.push_back({s, t, z});
  return g;
}

}  // namespace

TEST_CASE("offspring law normalisation") {
  const OffspringLaw law = binary_law();
  CHECK(law.mean() == doctest::Approx(0.5));
  CHECK(law.branch_rate == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(law.pgf(0.5) == doctest::Approx(0.75 + 0.25 * 0.25));

  CHECK_THROWS_AS(OffspringLaw::normalised({{0, 0.5}, {1, 0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(OffspringLaw::normalised({{0, 0.25}, {2, 0.75}}),
                  std::invalid_argument);  // supercritical
  CHECK_THROWS_AS(OffspringLaw::normalised({{0, 0.5}, {2, 0.5}}),
                  std::invalid_argument);  // critical
  CHECK_THROWS_AS(OffspringLaw::normalised({{0, 0.5}, {2, 0.4}}),
                  std::invalid_argument);  // not a pmf
}

TEST_CASE("closed-form F values") {
  const auto pd = BranchingSemigroup::pure_death();
  const auto bd = BranchingSemigroup::linear_birth_death(1.0);
  CHECK(pd.F(std::log(2.0), 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(bd.F(std::log(2.0), 0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(pd.F(0.0, 0.37) == 0.37);
  CHECK(bd.F(0.0, 0.37) == 0.37);
}

TEST_CASE("ODE path matches the closed-form oracle") {
  const auto gen = BranchingSemigroup::general(binary_law());
  const auto oracle = BranchingSemigroup::linear_birth_death(0.5);
  for (double s : {0.2, 0.7, 1.5, 3.0})
    for (double z : {0.0, 0.3, 0.6, 0.9})
      CHECK(gen.F(s, z) == doctest::Approx(oracle.F(s, z)).epsilon(1e-6));
  CHECK(gen.F(0.7, 0.3) == doctest::Approx(oracle.F(0.7, 0.3)).epsilon(1e-6));
}

TEST_CASE("generator values") {
  const auto pd = BranchingSemigroup::pure_death();
  const auto bd = BranchingSemigroup::linear_birth_death(1.0);
  const auto gen = BranchingSemigroup::general(binary_law());
  CHECK(pd.U(0.3) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(bd.U(0.0) == doctest::Approx(2.0).epsilon(1e-12));
  for (const auto& sg : {pd, bd, gen}) {
    CHECK(sg.U(1.0) == doctest::Approx(0.0).epsilon(1e-12));
    for (double z : {0.0, 0.4, 0.9}) CHECK(sg.U(z) > 0.0);
  }
}

TEST_CASE("A and B functions") {
  const auto pd = BranchingSemigroup::pure_death();
  const auto bd = BranchingSemigroup::linear_birth_death(1.0);
  CHECK(pd.A(0.3) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(bd.A(0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(pd.B(0.4) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(bd.B(0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(bd.A(0.0) == 1.0);
  CHECK(bd.B(1.0) == 1.0);

  const auto gen = BranchingSemigroup::general(binary_law());
  const auto oracle = BranchingSemigroup::linear_birth_death(0.5);
  for (double z : {0.0, 0.25, 0.5, 0.75, 0.95})
    CHECK(gen.A(z) == doctest::Approx(oracle.A(z)).epsilon(1e-8));

  // Monotonicity and the shifted-geometric p.g.f. identity for B.
  double prev = bd.A(0.0);
  for (double z = 0.05; z <= 1.0; z += 0.05) {
    const double a = bd.A(z);
    CHECK(a < prev);
    prev = a;
    const double p = 0.5;  // 1/(1+lambda)
    const double sg_pgf = p * z / (1.0 - (1.0 - p) * z);
    CHECK(bd.B(z) == doctest::Approx(sg_pgf).epsilon(1e-9));
  }
}

TEST_CASE("cocycle identities") {
  for (const auto& sg : {BranchingSemigroup::pure_death(),
                         BranchingSemigroup::linear_birth_death(2.0)}) {
    for (double s : {0.3, 1.0, 2.5})
      for (double z : {0.0, 0.4, 0.8}) {
        const double es = std::exp(-s);
        CHECK(sg.A(sg.F(s, z)) == doctest::Approx(es * sg.A(z)).epsilon(1e-10));
        CHECK(sg.B(sg.F(s, z)) ==
              doctest::Approx(1.0 - es + es * sg.B(z)).epsilon(1e-10));
      }
  }
}

TEST_CASE("validate_conditions verdicts") {
  CHECK(validate_conditions(BranchingSemigroup::pure_death(), default_grid(),
                            1e-9)
            .pass);
  CHECK(validate_conditions(BranchingSemigroup::linear_birth_death(2.0),
                            default_grid(), 1e-9)
            .pass);
  CHECK(validate_conditions(BranchingSemigroup::general(binary_law()),
                            default_grid(), 1e-6)
            .pass);
}

TEST_CASE("Yaglom closed forms") {
  RngStream rng(11);
  const auto pd_law = BranchingSemigroup::pure_death().yaglom(8, 1.0, rng);
  CHECK(pd_law.rep == YaglomLaw::Rep::Constant);
  for (int i = 0; i < 10; ++i) CHECK(pd_law.sample(rng) == 1);

  const auto bd_law =
      BranchingSemigroup::linear_birth_death(1.0).yaglom(8, 1.0, rng);
  CHECK(bd_law.rep == YaglomLaw::Rep::ShiftedGeometric);
  CHECK(bd_law.p == doctest::Approx(0.5));
  CHECK(bd_law.pgf(0.5) == doctest::Approx(0.5 * 0.5 / (1.0 - 0.25)));
}

TEST_CASE("Yaglom sample_sum matches direct summation in law") {
  RngStream rng(12);
  YaglomLaw law;
  law.rep = YaglomLaw::Rep::ShiftedGeometric;
  law.p = 0.5;
  const std::size_t n = 30000;
  std::vector<std::uint64_t> direct(n), fast(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t s = 0;
    for (int k = 0; k < 7; ++k) s += law.sample(rng);
    direct[i] = s;
    fast[i] = law.sample_sum(7, rng);
  }
  CHECK(two_sample_counts("sample_sum", direct, fast, 0.01, 12).pass);
}

TEST_CASE("empirical Yaglom of the General path matches the closed form") {
  RngStream rng(13);
  const auto gen = BranchingSemigroup::general(binary_law());
  const YaglomLaw law = gen.yaglom(64, 12.0, rng);
  CHECK(law.rep == YaglomLaw::Rep::Empirical);
  CHECK(law.diagnostic <= 0.01);
  // Oracle: shifted geometric with success probability 1/(1+0.5) = 2/3.
  const std::size_t n = 20000;
  std::vector<std::uint64_t> emp(n), oracle(n);
  YaglomLaw closed;
  closed.rep = YaglomLaw::Rep::ShiftedGeometric;
  closed.p = 2.0 / 3.0;
  for (std::size_t i = 0; i < n; ++i) {
    emp[i] = law.sample(rng);
    oracle[i] = closed.sample(rng);
  }
  CHECK(two_sample_counts("yaglom_general", emp, oracle, 0.01, 13).pass);
}
