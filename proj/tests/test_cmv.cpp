#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "esslab/cmv.hpp"
#include "support.hpp"

using namespace esslab;

namespace {

using Mat = Eigen::MatrixXcd;

Mat to_eigen(const std::vector<cplx>& d, std::size_t n) {
  Mat m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d[i * n + j];
  return m;
}

// Dense L and M factors assembled block by block.
Mat dense_lm(const std::vector<cplx>& alpha, bool even) {
  const auto n = static_cast<Eigen::Index>(alpha.size());
  Mat F = Mat::Identity(n, n);
  for (Eigen::Index j = even ? 0 : 1; j < n; j += 2) {
    auto t = theta(alpha[static_cast<std::size_t>(j)]).matrix();
    if (j + 1 < n) {
      F(j, j) = t[0];
      F(j, j + 1) = t[1];
      F(j + 1, j) = t[2];
      F(j + 1, j + 1) = t[3];
    } else {
      F(j, j) = t[0];
    }
  }
  return F;
}

std::vector<cplx> random_alpha(std::mt19937_64& rng, std::size_t n, double r = 0.95) {
  std::uniform_real_distribution<double> U(0, 1), P(0, kTwoPi);
  std::vector<cplx> a;
  for (std::size_t i = 0; i < n; ++i) a.push_back(std::polar(r * U(rng), P(rng)));
  return a;
}

std::vector<double> eigen_angles(const Mat& U) {
  Eigen::ComplexEigenSolver<Mat> es(U, false);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(wrap_angle(std::arg(es.eigenvalues()(i))));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_SUITE("cmv") {

TEST_CASE("theta block examples") {
  auto m0 = theta(0.0).matrix();
  CHECK(m0 == std::array<cplx, 4>{0.0, 1.0, 1.0, 0.0});
  auto m1 = theta(1.0).matrix();
  CHECK(m1 == std::array<cplx, 4>{1.0, 0.0, 0.0, -1.0});
  auto m6 = theta(0.6).matrix();
  CHECK(std::abs(m6[0] - 0.6) < 1e-15);
  CHECK(std::abs(m6[1] - 0.8) < 1e-15);
  CHECK(std::abs(m6[2] - 0.8) < 1e-15);
  CHECK(std::abs(m6[3] + 0.6) < 1e-15);
  CHECK(theta(cplx(1.0 + 5e-15, 0)).rho == 0.0);
  CHECK_ERROR_KIND(theta(1.01), ErrorKind::kDomain);
}

TEST_CASE("theta blocks are unitary") {
  std::mt19937_64 rng(1);
  for (auto a : random_alpha(rng, 100, 1.0)) {
    auto t = theta(a).matrix();
    Mat m(2, 2);
    m << t[0], t[1], t[2], t[3];
    CHECK((m.adjoint() * m - Mat::Identity(2, 2)).norm() < 1e-14);
  }
  CHECK(rho_of(1.0 - 1e-12) == doctest::Approx(std::sqrt(2e-12)).epsilon(1e-4));
}

TEST_CASE("build_cmv matches the dense block product") {
  std::mt19937_64 rng(2);
  for (std::size_t n : {1u, 2u, 3u, 4u, 7u, 10u}) {
    auto alpha = random_alpha(rng, n);
    auto C = build_cmv(alpha);
    Mat ref = dense_lm(alpha, true) * dense_lm(alpha, false);
    CHECK((to_eigen(C.dense(), n) - ref).norm() < 1e-14);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i > j + 2 || j > i + 2) CHECK(C.at(i, j) == cplx(0, 0));
  }
  auto zero = build_cmv(std::vector<cplx>(4, 0.0));
  Mat ref = dense_lm(std::vector<cplx>(4, 0.0), true) * dense_lm(std::vector<cplx>(4, 0.0), false);
  CHECK((to_eigen(zero.dense(), 4) - ref).norm() == 0.0);
}

TEST_CASE("paraorthogonal CMV is unitary") {
  std::mt19937_64 rng(4);
  for (std::size_t n : {1u, 2u, 5u, 16u, 33u}) {
    auto alpha = random_alpha(rng, n);
    cplx beta = std::polar(1.0, 0.7);
    auto C = build_cmv(alpha, Boundary::kParaorthogonal, beta);
    Mat U = to_eigen(C.dense(), n);
    CHECK((U.adjoint() * U - Mat::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))).norm() < 1e-12);
  }
  auto one = build_cmv({0.3}, Boundary::kParaorthogonal, std::polar(1.0, 0.4));
  CHECK(std::abs(one.at(0, 0) - std::polar(1.0, -0.4)) < 1e-15);
}

TEST_CASE("extended windows") {
  std::vector<cplx> zeros(40, 0.0);
  auto w = build_extended_cmv_window(zeros, -20, -5, 5);
  // alpha = 0: every site maps two steps along a fixed direction
  for (std::size_t i = 0; i < w.size; ++i) {
    int nonzero = 0;
    for (std::size_t j = 0; j < w.size; ++j) nonzero += std::abs(w.dense[i * w.size + j]) > 0 ? 1 : 0;
    CHECK(nonzero <= 1);
  }

  std::vector<cplx> cut(40, 0.3);
  cut[20] = 1.0;   // coefficient index 0
  auto wc = build_extended_cmv_window(cut, -20, -6, 6);
  const long first = wc.first;
  for (std::size_t i = 0; i < wc.size; ++i)
    for (std::size_t j = 0; j < wc.size; ++j) {
      long si = first + static_cast<long>(i), sj = first + static_cast<long>(j);
      if ((si <= 0) != (sj <= 0)) CHECK(std::abs(wc.dense[i * wc.size + j]) < 1e-15);
    }

  std::vector<cplx> half(40, 0.5);
  auto wh = build_extended_cmv_window(half, -20, -6, 6);
  for (std::size_t i = 0; i + 2 < wh.size; ++i)
    for (std::size_t j = 0; j + 2 < wh.size; ++j)
      CHECK(std::abs(wh.dense[i * wh.size + j] - wh.dense[(i + 2) * wh.size + j + 2]) < 1e-15);

  CHECK_ERROR_KIND(build_extended_cmv_window(half, -20, -19, 5), ErrorKind::kWindow);
}

TEST_CASE("szego recursion examples") {
  cplx z = std::polar(1.0, 0.3);
  auto [p, ps] = szego_phi(std::vector<cplx>(5, 0.0), z);
  CHECK(std::abs(p - std::pow(z, 5)) < 1e-15);
  CHECK(std::abs(ps - 1.0) < 1e-15);
  cplx a0(0.2, -0.4);
  CHECK(std::abs(szego_phi({a0}, z).first - (z - std::conj(a0))) < 1e-15);
  std::mt19937_64 rng(6);
  auto alpha = random_alpha(rng, 30);
  auto [q, qs] = szego_phi(alpha, z);
  CHECK(std::abs(std::abs(q) - std::abs(qs)) < 1e-12 * std::abs(q));
}

TEST_CASE("paraorthogonal zero examples") {
  auto z4 = paraorthogonal_zeros(std::vector<cplx>(3, 0.0), 1.0);
  REQUIRE(z4.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(z4[static_cast<std::size_t>(k)] - k * kPi / 2) < 1e-10);
  auto z1 = paraorthogonal_zeros({}, std::polar(1.0, 0.8));
  REQUIRE(z1.size() == 1);
  CHECK(std::abs(z1[0] - (kTwoPi - 0.8)) < 1e-10);
}

TEST_CASE("paraorthogonal zeros are the CMV eigenvalues") {
  std::mt19937_64 rng(8);
  for (std::size_t n : {2u, 5u, 12u, 40u, 120u}) {
    auto interior = random_alpha(rng, n - 1);
    cplx beta = std::polar(1.0, 2.1);
    auto zeros = paraorthogonal_zeros(interior, beta);
    auto full = interior;
    full.push_back(beta);
    auto ref = eigen_angles(to_eigen(build_cmv(full, Boundary::kParaorthogonal, beta).dense(), n));
    REQUIRE(zeros.size() == n);
    for (std::size_t i = 0; i < n; ++i) CHECK(circle_distance(zeros[i], ref[i]) < 1e-8);
  }
}

TEST_CASE("paraorthogonal zeros near the unit circle boundary") {
  std::vector<cplx> alpha;
  for (int j = 1; j < 300; ++j) alpha.push_back(1.0 - 1.0 / (j + 1.0));
  auto zeros = paraorthogonal_zeros(alpha, 1.0);
  CHECK(zeros.size() == 300);
  CHECK(std::is_sorted(zeros.begin(), zeros.end()));
}

TEST_CASE("constant coefficient zeros fill the band arc") {
  auto zeros = paraorthogonal_zeros(std::vector<cplx>(999, 0.5), 1.0);
  auto arc = cmv_band_arcs(PeriodicVerblunsky{{0.5}});
  // real coefficients with beta = 1 always vanish at z = 1: one gap zero
  CHECK(zeros.front() < 1e-9);
  std::vector<double> bulk(zeros.begin() + 1, zeros.end());
  for (double t : bulk) CHECK((t >= kPi / 3 - 0.05 && t <= 5 * kPi / 3 + 0.05));
  CHECK(hausdorff_distance(PointCloud{SetKind::kCircle, bulk}, arc) <= 0.05);
  double gap = 0;
  for (std::size_t i = 1; i < bulk.size(); ++i) gap = std::max(gap, bulk[i] - bulk[i - 1]);
  CHECK(gap <= 0.05);
  // a generic boundary parameter leaves only a couple of zeros in the gap:
  // the bound state at z = 1 and one zero moving with beta
  auto rotated = paraorthogonal_zeros(std::vector<cplx>(999, 0.5), std::polar(1.0, 2.0));
  int outside = 0;
  for (double t : rotated) outside += arc.contains(t, 0.05) ? 0 : 1;
  CHECK(outside <= 2);
}

TEST_CASE("discriminant examples") {
  PeriodicVerblunsky zero{{0.0}};
  for (double t : {0.0, kPi / 2, kPi}) CHECK(cmv_discriminant(zero, t).value == doctest::Approx(2 * std::cos(t / 2)));
  PeriodicVerblunsky a{{0.6}};
  for (double t : {0.0, 1.0, 2.5}) {
    CHECK(cmv_discriminant(a, t).value == doctest::Approx(2 * std::cos(t / 2) / 0.8));
  }
  PeriodicVerblunsky odd{{cplx(0.3, 0.1), cplx(-0.2, 0.4), 0.5}};
  for (double t : {0.2, 1.7, 4.0}) {
    CHECK(cmv_discriminant(odd, t + kTwoPi).value == doctest::Approx(-cmv_discriminant(odd, t).value));
  }
  CHECK_ERROR_KIND(cmv_discriminant(PeriodicVerblunsky{{1.0}}, 0.1), ErrorKind::kDomain);
}

TEST_CASE("discriminant is real on the circle") {
  std::mt19937_64 rng(9);
  for (std::size_t p = 1; p <= 8; ++p) {
    PeriodicVerblunsky P{random_alpha(rng, p, 0.9)};
    double worst = 0;
    for (int k = 0; k < 10000; ++k) worst = std::max(worst, std::abs(cmv_discriminant(P, 4 * kPi * k / 10000).imag));
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("band arc examples") {
  CHECK(cmv_band_arcs(PeriodicVerblunsky{{0.0}}).is_full_circle());
  auto arcs = cmv_band_arcs(PeriodicVerblunsky{{0.5}}).arcs();
  REQUIRE(arcs.size() == 1);
  CHECK(std::abs(arcs[0].lo - kPi / 3) < 1e-10);
  CHECK(std::abs(arcs[0].hi - 5 * kPi / 3) < 1e-10);
  double prev = kTwoPi;
  for (double a : {0.3, 0.6, 0.9, 0.99}) {
    auto s = cmv_band_arcs(PeriodicVerblunsky{{a}});
    CHECK(s.measure() < prev);
    CHECK(s.contains(kPi));
    prev = s.measure();
  }
  CHECK(prev < 0.6);
}

TEST_CASE("band arcs are rotation invariant") {
  std::mt19937_64 rng(10);
  for (std::size_t p = 1; p <= 4; ++p) {
    auto alpha = random_alpha(rng, p, 0.8);
    auto ref = cmv_band_arcs(PeriodicVerblunsky{alpha});
    for (double phi : {0.4, 2.0, 5.5}) {
      auto rot = alpha;
      for (auto& a : rot) a *= std::polar(1.0, phi);
      CHECK(hausdorff_distance(cmv_band_arcs(PeriodicVerblunsky{rot}), ref) <= 1e-8);
    }
  }
}

TEST_CASE("period two zeros agree with the arcs") {
  std::vector<cplx> alpha;
  for (int j = 0; j < 999; ++j) alpha.push_back(j % 2 ? cplx(-0.3, 0.2) : cplx(0.4, 0));
  PointCloud cloud{SetKind::kCircle, paraorthogonal_zeros(alpha, 1.0)};
  auto arcs = cmv_band_arcs(PeriodicVerblunsky{{cplx(0.4, 0), cplx(-0.3, 0.2)}});
  CHECK(excess(arcs, cloud) <= 0.05);
}

TEST_CASE("small unitary eigen angles") {
  std::mt19937_64 rng(12);
  for (std::size_t k : {1u, 2u, 4u, 6u}) {
    auto alpha = random_alpha(rng, k);
    auto C = build_cmv(alpha, Boundary::kParaorthogonal, std::polar(1.0, 0.3));
    auto got = unitary_eigen_angles(C.dense(), k);
    auto ref = eigen_angles(to_eigen(C.dense(), k));
    REQUIRE(got.size() == k);
    for (std::size_t i = 0; i < k; ++i) CHECK(circle_distance(got[i], ref[i]) < 1e-9);
  }
  std::vector<cplx> not_unitary{2.0};
  CHECK_ERROR_KIND(unitary_eigen_angles(not_unitary, 1), ErrorKind::kDomain);
}

TEST_CASE("triplet dump") {
  std::ostringstream os;
  write_triplets(os, build_cmv({0.0}));
  CHECK(os.str().rfind("row,col,re,im\n", 0) == 0);
}

}  // TEST_SUITE
