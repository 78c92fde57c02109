#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "esslab/jacobi.hpp"
#include "esslab/localization.hpp"
#include "support.hpp"

using namespace esslab;

namespace {

FiniteJacobi random_jacobi(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> U(-2, 2), A(0.05, 1.5);
  FiniteJacobi M;
  for (std::size_t i = 0; i < n; ++i) M.b.push_back(U(rng));
  for (std::size_t i = 0; i + 1 < n; ++i) M.a.push_back(A(rng));
  return M;
}

std::vector<double> eigen_eigenvalues(const FiniteJacobi& M) {
  const auto n = static_cast<Eigen::Index>(M.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) D(i, i) = M.b[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    D(i, i + 1) = D(i + 1, i) = M.a[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + n};
}

}  // namespace

TEST_SUITE("jacobi") {

TEST_CASE("truncation examples") {
  auto f = truncate(free_jacobi(), 2);
  CHECK(f.b == std::vector<double>{0, 0});
  CHECK(f.a == std::vector<double>{1});
  auto p = truncate(periodic_jacobi({1, 1}, {1, -1}), 3);
  CHECK(p.b == std::vector<double>{1, -1, 1});
  CHECK(p.a == std::vector<double>{1, 1});
  auto d = truncate(decaying_jacobi(power_rule(1, 1), constant_rule(0)), 3);
  CHECK(d.a == std::vector<double>{1, 0.5});
  CHECK_ERROR_KIND(truncate(barrios_lopez(0.5, sqrt_slip()), 3), ErrorKind::kKindMismatch);
}

TEST_CASE("sturm count examples") {
  auto f3 = truncate(free_jacobi(), 3);
  CHECK(sturm_count(f3, -0.5) == 1);
  CHECK(sturm_count(f3, -10) == 0);
  CHECK(sturm_count(f3, 0.1) == 2);
  CHECK(sturm_count(f3, 10) == 3);
  CHECK(sturm_count(FiniteJacobi{{5}, {}}, 6) == 1);
  CHECK(sturm_count(FiniteJacobi{{5}, {}}, 4) == 0);
  // on an exact eigenvalue the zero pivot is perturbed: either neighbour count
  long at = sturm_count(f3, 0.0);
  CHECK((at == 1 || at == 2));
}

TEST_CASE("eigenvalue examples") {
  auto e2 = eigenvalues(FiniteJacobi{{0, 0}, {1}});
  CHECK(std::abs(e2[0] + 1) < 1e-10);
  CHECK(std::abs(e2[1] - 1) < 1e-10);
  auto e3 = eigenvalues(truncate(free_jacobi(), 3));
  CHECK(std::abs(e3[0] + std::sqrt(2.0)) < 1e-10);
  CHECK(std::abs(e3[1]) < 1e-10);
  CHECK(std::abs(e3[2] - std::sqrt(2.0)) < 1e-10);
  auto e1 = eigenvalues(FiniteJacobi{{-1}, {}});
  REQUIRE(e1.size() == 1);
  CHECK(std::abs(e1[0] + 1) < 1e-10);
}

TEST_CASE("free truncation matches the cosine formula") {
  const int N = 500;
  auto ev = eigenvalues(truncate(free_jacobi(), N));
  for (int k = 1; k <= N; ++k) {
    CHECK(std::abs(ev[static_cast<std::size_t>(N - k)] - 2 * std::cos(k * kPi / (N + 1))) < 1e-9);
  }
}

TEST_CASE("bisection agrees with a dense solver") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    auto M = random_jacobi(rng, 5 + 7 * static_cast<std::size_t>(t));
    auto ev = eigenvalues(M);
    auto ref = eigen_eigenvalues(M);
    REQUIRE(ev.size() == ref.size());
    for (std::size_t i = 0; i < ev.size(); ++i) CHECK(std::abs(ev[i] - ref[i]) < 1e-9);
    auto [lo, hi] = gershgorin(M);
    CHECK(ev.front() >= lo);
    CHECK(ev.back() <= hi);
    for (std::size_t i = 0; i < ev.size(); ++i) {
      CHECK(sturm_count(M, ev[i] - 1e-7) <= static_cast<long>(i));
      CHECK(sturm_count(M, ev[i] + 1e-7) >= static_cast<long>(i) + 1);
    }
  }
}

TEST_CASE("degenerate couplings split the matrix") {
  FiniteJacobi M{{0, 0, 3, 3}, {1, 0, 0}};
  auto ev = eigenvalues(M);
  CHECK(ev[0] == doctest::Approx(-1));
  CHECK(ev[1] == doctest::Approx(1));
  CHECK(ev[2] == doctest::Approx(3));
  CHECK(ev[3] == doctest::Approx(3));
}

TEST_CASE("discriminant examples") {
  PeriodicJacobi f{{1}, {0}};
  for (double x : {-3.0, 0.0, 0.7, 2.0}) CHECK(discriminant(f, x) == doctest::Approx(x));
  PeriodicJacobi p2{{1, 1}, {1, -1}};
  for (double x : {0.0, 1.0, -1.0, 2.0, -2.0}) {
    CHECK(discriminant(p2, x) == doctest::Approx(x * x - 3).epsilon(1e-14));
  }
  PeriodicJacobi p3{{0.5, 2, 1}, {0.3, -1, 0.2}};
  double big = 1e4;
  CHECK(discriminant(p3, big) / std::pow(big, 3) == doctest::Approx(1.0).epsilon(1e-3));
  auto [d, dd] = discriminant_with_derivative(p3, 0.37);
  double h = 1e-6;
  CHECK(d == doctest::Approx(discriminant(p3, 0.37)));
  CHECK(dd == doctest::Approx((discriminant(p3, 0.37 + h) - discriminant(p3, 0.37 - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("band spectrum examples") {
  auto f = band_spectrum(PeriodicJacobi{{1}, {0}});
  REQUIRE(f.intervals().size() == 1);
  CHECK(std::abs(f.intervals()[0].lo + 2) < 1e-12);
  CHECK(std::abs(f.intervals()[0].hi - 2) < 1e-12);

  auto p2 = band_spectrum(PeriodicJacobi{{1, 1}, {1, -1}});
  REQUIRE(p2.intervals().size() == 2);
  CHECK(std::abs(p2.intervals()[0].lo + std::sqrt(5.0)) < 1e-12);
  CHECK(std::abs(p2.intervals()[0].hi + 1) < 1e-12);
  CHECK(std::abs(p2.intervals()[1].lo - 1) < 1e-12);
  CHECK(std::abs(p2.intervals()[1].hi - std::sqrt(5.0)) < 1e-12);

  auto s = band_spectrum(PeriodicJacobi{{1}, {0.75}});
  CHECK(std::abs(s.intervals()[0].lo + 1.25) < 1e-12);
  CHECK(std::abs(s.intervals()[0].hi - 2.75) < 1e-12);
}

TEST_CASE("closed gaps do not split bands") {
  // constant coefficients written with period 3: the two interior gaps close
  auto s = band_spectrum(PeriodicJacobi{{1, 1, 1}, {0, 0, 0}});
  REQUIRE(s.intervals().size() == 1);
  CHECK(std::abs(s.intervals()[0].lo + 2) < 1e-9);
  CHECK(std::abs(s.intervals()[0].hi - 2) < 1e-9);
}

TEST_CASE("band edges solve discriminant = +-2 and match truncations") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1.5, 1.5), A(0.4, 1.6);
  for (int t = 0; t < 8; ++t) {
    std::size_t p = 1 + static_cast<std::size_t>(t % 5);
    PeriodicJacobi P;
    for (std::size_t j = 0; j < p; ++j) {
      P.a.push_back(A(rng));
      P.b.push_back(U(rng));
    }
    auto bands = band_spectrum(P);
    CHECK(bands.intervals().size() <= p);
    for (auto& iv : bands.intervals()) {
      CHECK(std::abs(std::abs(discriminant(P, iv.lo)) - 2) < 1e-7);
      CHECK(std::abs(std::abs(discriminant(P, iv.hi)) - 2) < 1e-7);
      CHECK(std::abs(discriminant(P, 0.5 * (iv.lo + iv.hi))) <= 2 + 1e-9);
    }
    auto spec = periodic_jacobi(P.a, P.b);
    const std::size_t N = 2000;
    PointCloud cloud{SetKind::kLine, eigenvalues(truncate(spec, N))};
    // the bulk of the truncation spectrum fills the bands; edge states may sit in gaps
    CHECK(excess(bands, cloud) <= 0.02);
  }
}

TEST_CASE("period two truncation is within 0.02 of its bands") {
  auto spec = periodic_jacobi({1, 1}, {1, -1});
  PointCloud cloud{SetKind::kLine, eigenvalues(truncate(spec, 2000))};
  CHECK(hausdorff_distance(cloud, band_spectrum(PeriodicJacobi{{1, 1}, {1, -1}})) <= 0.02);
}

TEST_CASE("weyl residual examples") {
  auto f = truncate(free_jacobi(), 9);
  std::vector<double> delta(9, 0.0);
  delta[4] = 1.0;
  CHECK(weyl_residual(f, 0.0, delta) == doctest::Approx(std::sqrt(2.0)));
  FiniteJacobi diag{{1, 2, 3, 4}, {0, 0, 0}};
  CHECK(weyl_residual(diag, 2.0, {0, 1, 0, 0}) == 0.0);
  CHECK_ERROR_KIND(weyl_residual(f, 0.0, std::vector<double>(9, 1.0)), ErrorKind::kSupport);
}

TEST_CASE("tapered Bloch waves have residual decreasing like 1/L") {
  const double theta = 0.9;
  auto f = truncate_at(free_jacobi(), 100000, 300);
  double prev = 1e300;
  for (long L : {8L, 16L, 32L}) {
    auto tent = tent_values(L);
    std::vector<double> phi(300, 0.0);
    for (long n = 1; n <= 2 * L - 1; ++n) phi[static_cast<std::size_t>(50 + n)] = tent.at(n) * std::sin(n * theta);
    double r = weyl_residual(f, 2 * std::cos(theta), phi);
    CHECK(r < prev);
    CHECK(r <= 10.0 / static_cast<double>(L));
    prev = r;
  }
}

TEST_CASE("csv dump") {
  std::ostringstream os;
  write_csv(os, FiniteJacobi{{1, 2}, {0.5}});
  CHECK(os.str() == "index,a,b\n1,0.5,1\n2,,2\n");
}

TEST_CASE("localized bound states of a single bump") {
  // one site with potential v: bound state at sign(v) sqrt(v^2 + 4)
  auto e = localized_bound_states(LocalizedLimit{{1}, {1.5}});
  REQUIRE(e.size() == 1);
  CHECK(e[0] == doctest::Approx(std::sqrt(1.5 * 1.5 + 4)).epsilon(1e-10));
}

}  // TEST_SUITE
