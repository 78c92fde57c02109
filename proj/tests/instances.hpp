#pragma once

// Random two-sided windows that satisfy the finite-essential-spectrum block
// conditions exactly, built block by block from the target points.

#include <cmath>
#include <random>

#include "esslab/criteria.hpp"

namespace esslab::test {

struct JacobiInstance {
  JacobiTable table;
  double x1 = 0.0, x2 = 0.0;
};

/// Sites decouple (a = 0) between 1x1 blocks b in {x1, x2} and 2x2 blocks
/// with trace x1 + x2 and determinant x1 x2.
inline JacobiInstance exact_jacobi_instance(std::mt19937_64& rng, std::size_t sites) {
  std::uniform_real_distribution<double> U(-2.0, 2.0), T(0.0, 1.0);
  JacobiInstance in;
  in.x1 = U(rng);
  in.x2 = in.x1 + 0.1 + 2.0 * T(rng);
  auto& t = in.table;
  while (t.b.size() < sites) {
    if (!t.b.empty()) t.a.push_back(0.0);
    // the window starts and ends on a 1x1 block so that no block is cut
    if (t.b.empty() || T(rng) < 0.4 || t.b.size() + 3 > sites) {
      t.b.push_back(T(rng) < 0.5 ? in.x1 : in.x2);
    } else {
      double s = in.x1 + (in.x2 - in.x1) * (0.05 + 0.9 * T(rng));
      t.b.push_back(s);
      t.b.push_back(in.x1 + in.x2 - s);
      t.a.push_back(std::sqrt(-(s - in.x1) * (s - in.x2)));
    }
  }
  t.a.push_back(0.0);
  return in;
}

struct CmvInstance {
  std::vector<cplx> alpha;
  cplx l1, l2;
};

/// Unimodular coefficients with -conj(alpha_{n+1}) alpha_n in {l1, l2}, and
/// interior coefficients whose 2x2 decoupled block has eigenvalues l1, l2.
inline CmvInstance exact_cmv_instance(std::mt19937_64& rng, std::size_t sites) {
  std::uniform_real_distribution<double> P(0.0, 6.283185307179586), T(0.0, 1.0);
  CmvInstance in;
  double t1 = P(rng), t2 = t1 + 0.2 + 5.8 * T(rng);
  in.l1 = std::polar(1.0, t1);
  in.l2 = std::polar(1.0, t2);
  const double phi = t1 + t2;
  const double re = -std::cos(0.5 * (t1 - t2));
  cplx u = std::polar(1.0, P(rng));
  in.alpha.push_back(u);
  while (in.alpha.size() < sites) {
    if (T(rng) < 0.4 || in.alpha.size() + 2 > sites) {
      cplx l = T(rng) < 0.5 ? in.l1 : in.l2;
      u = -std::conj(l) * u;
      in.alpha.push_back(u);
    } else {
      double w = std::sqrt(1.0 - re * re) * (2.0 * T(rng) - 1.0) * 0.95;
      cplx v(re, w);
      in.alpha.push_back(u * std::polar(1.0, -0.5 * phi) * v);
      u = std::polar(1.0, -phi) * u;
      in.alpha.push_back(u);
    }
  }
  return in;
}

}  // namespace esslab::test
