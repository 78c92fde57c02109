#include <cmath>
#include <random>

#include "esslab/localization.hpp"
#include "support.hpp"

using namespace esslab;

namespace {

FiniteJacobi random_window(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> U(-2, 2), A(0.1, 2.0);
  FiniteJacobi M;
  for (std::size_t i = 0; i < n; ++i) M.b.push_back(U(rng));
  for (std::size_t i = 0; i + 1 < n; ++i) M.a.push_back(A(rng));
  return M;
}

double norm2(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TEST_SUITE("localization") {

TEST_CASE("tent examples") {
  auto t2 = tent_values(2);
  CHECK(t2.psi == std::vector<double>{0, 0.5, 0});
  CHECK(t2.c == 0.5);
  CHECK_FALSE(t2.degenerate);

  auto t1 = tent_values(1);
  CHECK(t1.psi == std::vector<double>{0});
  CHECK(t1.c == 0.0);
  CHECK(t1.degenerate);

  auto t3 = tent_values(3);
  REQUIRE(t3.psi.size() == 5);
  CHECK(t3.psi[0] == 0.0);
  CHECK(t3.psi[1] == doctest::Approx(1.0 / 3));
  CHECK(t3.psi[2] == doctest::Approx(2.0 / 3));
  CHECK(t3.psi[3] == doctest::Approx(1.0 / 3));
  CHECK(t3.psi[4] == 0.0);
  CHECK(t3.at(0) == 0.0);
  CHECK(t3.at(6) == 0.0);
  CHECK(t3.j(10, 13) == doctest::Approx((2.0 / 3) / t3.c));

  CHECK_ERROR_KIND(tent_values(0), ErrorKind::kDomain);
}

TEST_CASE("tent normalization grows like sqrt(2L/3)") {
  // c_L^2 L^2 = sum_{k<L} k^2 + sum_{k<L-1} k^2, so c_L / sqrt(L) rises from 0.354 at L = 2
  // towards sqrt(2/3) ~ 0.816: the band [0.5, 0.7] is left at both ends
  double prev = 0;
  for (long L = 2; L <= 1024; L *= 2) {
    auto t = tent_values(L);
    double s = 0;
    for (double v : t.psi) s += v * v;
    CHECK(t.c * t.c == doctest::Approx(s).epsilon(1e-14));
    const double dL = static_cast<double>(L);
    const double sq = ((dL - 1) * dL * (2 * dL - 1) + (dL - 2) * (dL - 1) * (2 * dL - 3)) / 6;
    CHECK(t.c * t.c == doctest::Approx(sq / (dL * dL)).epsilon(1e-12));
    double ratio = t.c / std::sqrt(dL);
    CHECK(ratio > prev);
    CHECK(ratio < std::sqrt(2.0 / 3.0));
    prev = ratio;
  }
  CHECK(tent_values(2).c / std::sqrt(2.0) == doctest::Approx(0.353553).epsilon(1e-5));
  CHECK(tent_values(1024).c / std::sqrt(1024.0) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-3));
}

TEST_CASE("partition of unity in the bulk") {
  for (long L : {2L, 4L, 64L}) {
    auto r = partition_identity_residual(L, 2 * L, 2 * L + 500);
    CHECK(r.residual < 1e-12);
    CHECK_FALSE(r.boundary);
  }
  auto edge = partition_identity_residual(4, 1, 10);
  CHECK(edge.boundary);
  CHECK(edge.residual > 0.1);
  CHECK(edge.sums[0] == 0.0);
  CHECK_ERROR_KIND(partition_identity_residual(4, 0, 3), ErrorKind::kIndex);
  CHECK_ERROR_KIND(partition_identity_residual(1, 5, 8), ErrorKind::kDomain);
}

TEST_CASE("commutator norm of the free operator scales like L^-2") {
  // measured values of ||C|| L^2 on a window of 16L sites
  const std::vector<std::pair<long, double>> frozen{{4, 30.27}, {8, 27.69},  {16, 25.88}, {32, 24.94},
                                                    {64, 24.47}, {128, 24.23}, {256, 24.12}};
  double lo = 1e300, hi = 0, prev = 0;
  for (auto [L, value] : frozen) {
    auto e = commutator_C_norm(free_jacobi(), L, 0, 16 * L);
    CHECK(e.norm_L2 == doctest::Approx(value).epsilon(1e-3));
    lo = std::min(lo, e.norm_L2);
    hi = std::max(hi, e.norm_L2);
    if (L >= 16) {
      double r = e.norm / prev;
      CHECK(r >= 0.2);
      CHECK(r <= 0.3);
    }
    prev = e.norm;
  }
  CHECK(hi <= 2 * lo);
  CHECK_ERROR_KIND(commutator_C_norm(free_jacobi(), 8, 0, 63), ErrorKind::kWindow);
}

TEST_CASE("commutator norm is quadratic in the couplings") {
  auto one = commutator_C_norm(free_jacobi(), 8, 0, 128);
  auto two = commutator_C_norm(periodic_jacobi({2}, {0}), 8, 0, 128);
  CHECK(two.norm == doctest::Approx(4 * one.norm).epsilon(1e-6));
}

TEST_CASE("commutator operator is nonnegative") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> G;
  auto M = random_window(rng, 60);
  auto C = commutator_operator(M, tent_values(5));
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(60);
    for (auto& v : x) v = G(rng);
    CHECK(C.quadratic_form(x) >= -1e-12);
  }
}

TEST_CASE("power iteration reports its history on failure") {
  CommutatorOperator C{{1, 1, 1}, {0.5}};
  auto e = power_iteration_norm(C);
  CHECK(e.norm == doctest::Approx(1.5).epsilon(1e-6));
  CommutatorOperator hard{{1, 1}, {}};
  CHECK(power_iteration_norm(hard).norm == doctest::Approx(1.0));
  CommutatorOperator slow{{1.0, 1.0 - 1e-9, 0.5}, {0.0}};
  CHECK_ERROR_KIND(power_iteration_norm(slow, 1e-16, 3), ErrorKind::kNumeric);
}

TEST_CASE("localized trial examples") {
  // a point mass: tents act as scalars
  auto M = truncate(free_jacobi(), 30);
  std::vector<double> delta(30, 0.0);
  delta[14] = 1.0;
  auto t = localize_trial(M, 0.3, delta, 4);
  CHECK(t.ratio == doctest::Approx(residual_norm(M, 0.3, delta)));
  for (std::size_t i = 0; i < 30; ++i) {
    if (i != 14) CHECK(t.vector[i] == 0.0);
  }
  CHECK(t.bound_holds);

  // an exact eigenvector of a decoupled block
  FiniteJacobi B{{0, 0, 0, 0, 0, 0}, {0, 0, 1, 0, 0}};
  std::vector<double> phi{0, 0, 1, 1, 0, 0};
  auto e = localize_trial(B, 1.0, phi, 3);
  CHECK(e.base_ratio == 0.0);
  CHECK(e.ratio <= std::sqrt(e.c_norm) + 1e-12);

  // a wide tapered Bloch wave on the free operator
  const double theta = 1.1;
  auto F = truncate(free_jacobi(), 400);
  std::vector<double> wave(400);
  for (std::size_t n = 0; n < 400; ++n) wave[n] = std::sin(static_cast<double>(n + 1) * theta);
  auto w = localize_trial(F, 2 * std::cos(theta), wave, 16);
  CHECK(w.bound_holds);
  CHECK(w.slack >= 0.0);

  CHECK_ERROR_KIND(localize_trial(F, 0, std::vector<double>(400, 0.0), 4), ErrorKind::kSupport);
  CHECK_ERROR_KIND(localize_trial(F, 0, std::vector<double>(10, 1.0), 4), ErrorKind::kWindow);
}

TEST_CASE("the localization bound holds on random triples") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> G;
  std::uniform_int_distribution<int> S(20, 80), Ls(2, 12);
  std::uniform_real_distribution<double> Lam(-3, 3);
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    auto M = random_window(rng, static_cast<std::size_t>(S(rng)));
    std::vector<double> phi(M.size());
    for (auto& v : phi) v = G(rng);
    long L = Ls(rng);
    double lambda = Lam(rng);
    auto r = localize_trial(M, lambda, phi, L);
    violations += r.bound_holds ? 0 : 1;
    CHECK(r.ratio * r.ratio <= 2 * r.base_ratio * r.base_ratio + r.rayleigh + 1e-10 * (1 + r.ratio * r.ratio));
  }
  CHECK(violations == 0);
}

TEST_CASE("summed localized residuals are bounded by the commutator form") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> G;
  for (int t = 0; t < 200; ++t) {
    auto M = random_window(rng, 40);
    std::vector<double> phi(40);
    for (auto& v : phi) v = G(rng);
    const long L = 3 + t % 6;
    const double lambda = 0.1 * (t % 30) - 1.5;
    auto tent = tent_values(L);
    double lhs = 0;
    for (long alpha = 1 - (2 * L - 1); alpha <= 39; ++alpha) {
      std::vector<double> v(40);
      for (long n = 1; n <= 40; ++n) v[static_cast<std::size_t>(n - 1)] = tent.j(alpha, n) * phi[static_cast<std::size_t>(n - 1)];
      double r = residual_norm(M, lambda, v);
      lhs += r * r;
    }
    double base = residual_norm(M, lambda, phi);
    double rhs = 2 * base * base + commutator_operator(M, tent).quadratic_form(phi);
    CHECK(lhs <= rhs * (1 + 1e-10));
    CHECK(norm2(phi) > 0);
  }
}

}  // TEST_SUITE
