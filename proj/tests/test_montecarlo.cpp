#include <cmath>

#include "doctest.h"
#include "lrp/errors.hpp"
#include "lrp/montecarlo.hpp"

using namespace lrp;

TEST_CASE("theta extremes") {
  const auto zero = estimate_theta(Kernel::nearest_neighbour(2, 0.0), 4, 100, 0);
  CHECK(zero.estimate == 0.0);
  CHECK(zero.stderr_ == 0.0);
  CHECK(estimate_theta(Kernel::nearest_neighbour(2, 1.0), 4, 100, 0).estimate == 1.0);
}

TEST_CASE("theta is monotone in the kernel replica by replica") {
  const RegionGraph lo(Kernel::nearest_neighbour(2, 0.4), ball(2, 6));
  const RegionGraph hi(Kernel::nearest_neighbour(2, 0.5), ball(2, 6));
  for (std::uint64_t s = 0; s < 2000; ++s) {
    if (reaches_boundary(lo, FieldMarks(lo, MarkField(s)))) CHECK(reaches_boundary(hi, FieldMarks(hi, MarkField(s))));
  }
}

TEST_CASE("susceptibility") {
  CHECK(estimate_susceptibility(Kernel::nearest_neighbour(2, 0.0), 3, 50, 0).estimate == 1.0);
  const auto s = estimate_susceptibility(Kernel::nearest_neighbour(1, 0.5), 1, 20000, 0);
  CHECK(std::abs(s.estimate - 2.0) < 4 * s.stderr_);
  const auto k = Kernel::nearest_neighbour(2, 0.45);
  double prev = 0.0;
  for (int n = 1; n <= 6; ++n) {
    const double e = estimate_susceptibility(k, n, 2000, 0).estimate;
    CHECK(e >= prev);
    prev = e;
  }
}

TEST_CASE("parallel results equal sequential") {
  const auto k = Kernel::nearest_neighbour(2, 0.5);
  const auto a = estimate_theta(k, 6, 3000, 7, 1);
  const auto b = estimate_theta(k, 6, 3000, 7, 4);
  CHECK(a.estimate == b.estimate);
  CHECK(a.stderr_ == b.stderr_);
}

TEST_CASE("least squares") {
  const auto f = least_squares({1, 2, 3, 4}, {1, 3, 5, 7});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(-1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("decay") {
  try {
    estimate_decay(Kernel::nearest_neighbour(2, 0.0), {1, 2, 3}, 100, 0);
    FAIL("expected a fit error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kFit);
  }
  // Z^1: theta_n = 1 - (1 - rho^(n+1))^2, log-slope close to log rho.
  const auto f = estimate_decay(Kernel::nearest_neighbour(1, 0.5), {1, 2, 3, 4, 5}, 40000, 0);
  CHECK(std::abs(f.slope - std::log(0.5)) < 0.06);
  for (const auto& p : f.points) {
    const double x = std::pow(0.5, p.n + 1);
    const double exact = 1 - (1 - x) * (1 - x);
    CHECK(std::abs(p.estimate - exact) < 4 * std::sqrt(exact * (1 - exact) / 40000) + 1e-12);
  }
}

TEST_CASE("bisection") {
  PhiFamily zero;
  zero.d = 2;
  zero.table = Kernel::Entries{{Vertex{1, 0}, 0.0}, {Vertex{0, 1}, 0.0}};
  try {
    bisect_beta_c(zero, 4, 100, 0.5, 1e-2, 5.0, 0);
    FAIL("expected a bracketing error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kBracketing);
  }
  const auto wide = bisect_beta_c(zero, 4, 100, 0.5, 10.0, 5.0, 0);
  CHECK(wide.estimate == 2.5);
  CHECK(wide.evaluations.empty());
  PhiFamily nn = zero;
  nn.table = Kernel::Entries{{Vertex{1, 0}, 1.0}, {Vertex{0, 1}, 1.0}};
  const auto b = bisect_beta_c(nn, 8, 2000, 0.5, 0.01, 3.0, 0);
  CHECK(b.hi - b.lo <= 0.01);
  CHECK(b.lo <= b.estimate);
  CHECK(b.estimate <= b.hi);
  CHECK(to_csv(b.evaluations).rfind("n,parameter,theta,stderr\n", 0) == 0);
  PhiFamily poly;
  poly.d = 1;
  poly.alpha = 3.0;
  CHECK(poly.at(1.0).value(Vertex{2}) == doctest::Approx(1 - std::exp(-1.0 / 8)));
}

TEST_CASE("separation on a small instance") {
  const auto j = Kernel::nearest_neighbour(2, 0.3);
  const auto jp = j.with_overrides({{Vertex{0, 1}, 0.0}});
  const auto r = monotonicity_experiment(j, jp, {6}, 2000, 0, 4.0, 0.01);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].gap > 0);
  CHECK(r.rows[0].gap_se > 0);
  CHECK_THROWS_AS(monotonicity_experiment(j, j, {6}, 10, 0), Error);
}
