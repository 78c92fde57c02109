#include "esslab/cmv.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include "esslab/error.hpp"
#include "esslab/parallel.hpp"

namespace esslab {

double rho_of(cplx alpha) {
  double m = std::min(std::abs(alpha), 1.0);
  return std::sqrt((1.0 - m) * (1.0 + m));
}

std::array<cplx, 4> ThetaBlock::matrix() const {
  return {std::conj(alpha), cplx(rho, 0.0), cplx(rho, 0.0), -alpha};
}

ThetaBlock theta(cplx alpha) {
  double m = std::abs(alpha);
  if (!(m <= 1.0 + 1e-14)) {
    throw Error(ErrorKind::kDomain, "Verblunsky coefficient outside the closed unit disk");
  }
  if (m > 1.0) alpha /= m;
  return {alpha, rho_of(alpha)};
}

cplx FiniteCMV::at(std::size_t i, std::size_t j) const {
  if (i >= order || j >= order) return {};
  long d = static_cast<long>(j) - static_cast<long>(i);
  if (d < -2 || d > 2) return {};
  return band[5 * i + static_cast<std::size_t>(d + 2)];
}

std::vector<cplx> FiniteCMV::dense() const {
  std::vector<cplx> out(order * order);
  for (std::size_t i = 0; i < order; ++i) {
    for (std::size_t j = (i >= 2 ? i - 2 : 0); j < std::min(order, i + 3); ++j) {
      out[i * order + j] = at(i, j);
    }
  }
  return out;
}

namespace {

// Sparse row: up to two (column, value) pairs.
struct Entry {
  long col;
  cplx val;
};
using Row = std::vector<Entry>;

// Rows of a direct sum of Theta blocks where block_of(i) names the block
// covering site i: Theta_j acts on (j, j+1). Columns outside [col_lo, col_hi]
// are dropped, so a block sticking out of a finite matrix is cut to its
// inner corner.
template <class BlockAt>
std::vector<Row> block_rows(long lo, long hi, long col_lo, long col_hi,
                            bool even_blocks, const BlockAt& block_at) {
  std::vector<Row> rows(static_cast<std::size_t>(hi - lo + 1));
  for (long i = lo; i <= hi; ++i) {
    long parity = ((i % 2) + 2) % 2;
    long j = even_blocks ? i - parity : (parity == 1 ? i : i - 1);
    Row& r = rows[static_cast<std::size_t>(i - lo)];
    if (!block_at(j)) {
      r.push_back({i, cplx(1.0, 0.0)});   // identity site of M at the origin
      continue;
    }
    ThetaBlock t = *block_at(j);
    auto m = t.matrix();
    int local = static_cast<int>(i - j);   // 0 or 1
    for (int c = 0; c < 2; ++c) {
      long col = j + c;
      if (col < col_lo || col > col_hi) continue;
      cplx v = m[static_cast<std::size_t>(2 * local + c)];
      if (v != cplx(0.0, 0.0)) r.push_back({col, v});
    }
  }
  return rows;
}

}  // namespace

FiniteCMV build_cmv(const std::vector<cplx>& alpha_in, Boundary boundary, cplx beta) {
  const long n = static_cast<long>(alpha_in.size());
  if (n == 0) throw Error(ErrorKind::kDomain, "CMV matrix needs at least one coefficient");
  std::vector<cplx> alpha = alpha_in;
  if (boundary == Boundary::kParaorthogonal) {
    if (std::abs(std::abs(beta) - 1.0) > 1e-12) {
      throw Error(ErrorKind::kDomain, "paraorthogonal boundary needs |beta| = 1");
    }
    alpha.back() = beta;
  }
  std::vector<ThetaBlock> blocks;
  blocks.reserve(alpha.size());
  for (const auto& a : alpha) blocks.push_back(theta(a));
  auto block_at = [&](long j) -> const ThetaBlock* {
    if (j < 0 || j >= n) return nullptr;
    return &blocks[static_cast<std::size_t>(j)];
  };
  auto L = block_rows(0, n - 1, 0, n - 1, true, block_at);
  auto M = block_rows(0, n - 1, 0, n - 1, false, block_at);

  FiniteCMV C;
  C.order = static_cast<std::size_t>(n);
  C.boundary = boundary;
  C.band.assign(5 * C.order, cplx(0.0, 0.0));
  for (long i = 0; i < n; ++i) {
    for (const auto& l : L[static_cast<std::size_t>(i)]) {
      for (const auto& m : M[static_cast<std::size_t>(l.col)]) {
        long d = m.col - i;
        C.band[5 * static_cast<std::size_t>(i) + static_cast<std::size_t>(d + 2)] += l.val * m.val;
      }
    }
  }
  return C;
}

CmvWindow build_extended_cmv_window(const std::vector<cplx>& alpha, long offset,
                                    long first, long last) {
  if (last < first) throw Error(ErrorKind::kWindow, "empty CMV window");
  long tab_lo = offset, tab_hi = offset + static_cast<long>(alpha.size()) - 1;
  if (first - 2 < tab_lo || last + 1 > tab_hi) {
    throw Error(ErrorKind::kWindow, "coefficient table must cover the window plus one block of margin");
  }
  std::vector<ThetaBlock> blocks;
  for (const auto& a : alpha) blocks.push_back(theta(a));
  auto block_at = [&](long j) -> const ThetaBlock* {
    return &blocks[static_cast<std::size_t>(j - offset)];
  };
  // Rows of L on [first, last] need M rows on [first - 1, last + 1].
  auto L = block_rows(first, last, first - 1, last + 1, true, block_at);
  auto M = block_rows(first - 1, last + 1, first, last, false, block_at);
  CmvWindow w;
  w.first = first;
  w.size = static_cast<std::size_t>(last - first + 1);
  w.dense.assign(w.size * w.size, cplx(0.0, 0.0));
  for (long i = first; i <= last; ++i) {
    for (const auto& l : L[static_cast<std::size_t>(i - first)]) {
      for (const auto& m : M[static_cast<std::size_t>(l.col - (first - 1))]) {
        if (m.col < first || m.col > last) continue;
        w.dense[static_cast<std::size_t>(i - first) * w.size +
                static_cast<std::size_t>(m.col - first)] += l.val * m.val;
      }
    }
  }
  return w;
}

std::pair<cplx, cplx> szego_phi(const std::vector<cplx>& alpha, cplx z) {
  cplx phi(1.0, 0.0), star(1.0, 0.0);
  for (const auto& a : alpha) {
    cplx next = z * phi - std::conj(a) * star;
    star = star - a * z * phi;
    phi = next;
  }
  return {phi, star};
}

namespace {

// Lifted phase of the Blaschke product z Phi_m / Phi*_m at z = e^{it}, with
// m = alpha.size(). Each Szego step multiplies Phi* by 1 - alpha z Phi/Phi*,
// whose argument lies in (-pi/2, pi/2), so the lift of arg Phi* is tracked by
// counting crossings of the negative real axis. The result is continuous and
// strictly increasing in t and grows by 2 pi (m + 1) over one turn.
double blaschke_phase(const std::vector<cplx>& alpha, double t) {
  constexpr double kBig = 0x1p800, kSmall = 0x1p-800;
  const double zr = std::cos(t), zi = std::sin(t);
  double pr = 1.0, pi = 0.0, sr = 1.0, si = 0.0;
  long wind = 0;
  for (const auto& a : alpha) {
    const double ar = a.real(), ai = a.imag();
    const double wr = zr * pr - zi * pi, wi = zr * pi + zi * pr;  // z phi
    const double nr = wr - (ar * sr + ai * si), ni = wi - (ar * si - ai * sr);
    const double tr = sr - (ar * wr - ai * wi), ti = si - (ar * wi + ai * wr);
    if ((si >= 0.0) != (ti >= 0.0) && (sr < 0.0 || tr < 0.0)) wind += si >= 0.0 ? 1 : -1;
    pr = nr;
    pi = ni;
    sr = tr;
    si = ti;
    const double s2 = sr * sr + si * si;
    if (s2 > kBig || s2 < kSmall) {
      const double s = 1.0 / std::sqrt(s2);
      pr *= s;
      pi *= s;
      sr *= s;
      si *= s;
    }
  }
  double arg_star = si >= 0.0 ? std::atan2(std::abs(si), sr) : std::atan2(si, sr);
  return static_cast<double>(alpha.size() + 1) * t - 2.0 * (arg_star + kTwoPi * static_cast<double>(wind));
}

}  // namespace

std::vector<double> paraorthogonal_zeros(const std::vector<cplx>& alpha, cplx beta,
                                         double tol) {
  for (const auto& a : alpha) {
    if (!(std::abs(a) < 1.0)) {
      throw Error(ErrorKind::kDomain, "interior Verblunsky coefficients must satisfy |alpha| < 1");
    }
  }
  if (std::abs(std::abs(beta) - 1.0) > 1e-12) {
    throw Error(ErrorKind::kDomain, "paraorthogonal parameter must be unimodular");
  }
  const std::size_t n = alpha.size() + 1;
  // z Phi_{n-1} = conj(beta) Phi*_{n-1} iff the lifted phase hits
  // -arg(beta) + 2 pi k; the phase is monotone, so there are exactly n hits.
  const double c = -std::arg(beta);
  auto phase = [&](double t) { return blaschke_phase(alpha, t); };
  const std::size_t grid = 2 * n;
  std::vector<double> ts(grid + 1), ph(grid + 1);
  parallel_for(grid, [&](std::size_t i) {
    ts[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(grid);
    ph[i] = phase(ts[i]);
  });
  // The lift of arg Phi* depends on z alone, so the turn closes exactly; the
  // computed e^{2 pi i} is not exactly 1 and may sit across a steep step.
  ts[grid] = kTwoPi;
  ph[grid] = ph[0] + kTwoPi * static_cast<double>(n);
  for (double v : ph) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kNumeric, "non-finite Blaschke phase");
  }
  // Targets c + 2 pi k in [ph[0], ph[0] + 2 pi n).
  const long k0 = static_cast<long>(std::ceil((ph[0] - c) / kTwoPi));
  auto target = [&](long j) { return c + kTwoPi * static_cast<double>(k0 + j); };
  auto first_at_or_above = [&](double v) {
    return static_cast<long>(std::ceil((v - c) / kTwoPi)) - k0;
  };

  // Solves phase(t) = T on [lo, hi] with phase(lo) <= T < phase(hi).
  auto solve = [&](double lo, double hi, double flo, double fhi, double T) {
    flo -= T;
    fhi -= T;
    int side = 0;
    for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
      double mid = (lo * fhi - hi * flo) / (fhi - flo);
      if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      double fm = phase(mid) - T;
      if (fm == 0.0) return mid;
      if (fm < 0.0) {
        lo = mid;
        flo = fm;
        if (side == -1) fhi *= 0.5;
        side = -1;
      } else {
        hi = mid;
        fhi = fm;
        if (side == 1) flo *= 0.5;
        side = 1;
      }
    }
    return 0.5 * (lo + hi);
  };
  // Splits a cell until each piece holds one target.
  std::function<void(double, double, double, double, std::vector<double>&)> split =
      [&](double lo, double hi, double flo, double fhi, std::vector<double>& out) {
        long j0 = std::max(0L, first_at_or_above(flo));
        long j1 = std::min(static_cast<long>(n), first_at_or_above(fhi));
        if (j1 <= j0) return;
        if (j1 - j0 == 1) {
          out.push_back(solve(lo, hi, flo, fhi, target(j0)));
          return;
        }
        double mid = 0.5 * (lo + hi);
        if (hi - lo <= tol || mid <= lo || mid >= hi) {
          for (long j = j0; j < j1; ++j) out.push_back(mid);
          return;
        }
        double fm = phase(mid);
        split(lo, mid, flo, fm, out);
        split(mid, hi, fm, fhi, out);
      };

  std::vector<std::vector<double>> found(grid);
  parallel_for(grid, [&](std::size_t i) { split(ts[i], ts[i + 1], ph[i], ph[i + 1], found[i]); });
  std::vector<double> zeros;
  zeros.reserve(n);
  for (auto& f : found) {
    for (double t : f) {
      double z = wrap_angle(t);
      if (kTwoPi - z < tol) z = 0.0;
      zeros.push_back(z);
    }
  }
  if (zeros.size() != n) {
    throw Error(ErrorKind::kNumeric, "paraorthogonal zero count " + std::to_string(zeros.size()) +
                                         " differs from n = " + std::to_string(n));
  }
  std::sort(zeros.begin(), zeros.end());
  return zeros;
}

// ---------------------------------------------------------------------------
// Periodic Verblunsky sequences

void PeriodicVerblunsky::validate() const {
  if (alpha.empty()) throw Error(ErrorKind::kDomain, "periodic Verblunsky sequence needs p >= 1");
  for (const auto& a : alpha) {
    if (!(std::abs(a) < 1.0)) {
      throw Error(ErrorKind::kDomain, "degenerate period: |alpha_j| = 1 decouples the operator");
    }
  }
}

DiscriminantValue cmv_discriminant(const PeriodicVerblunsky& P, double th) {
  P.validate();
  const cplx z = std::polar(1.0, th);
  cplx t00(1.0), t01(0.0), t10(0.0), t11(1.0);
  double mag = 1.0;
  for (const auto& a : P.alpha) {
    double r = rho_of(a);
    cplx m00 = z / r, m01 = -std::conj(a) / r, m10 = -a * z / r, m11 = cplx(1.0 / r);
    cplx n00 = m00 * t00 + m01 * t10;
    cplx n01 = m00 * t01 + m01 * t11;
    cplx n10 = m10 * t00 + m11 * t10;
    cplx n11 = m10 * t01 + m11 * t11;
    t00 = n00;
    t01 = n01;
    t10 = n10;
    t11 = n11;
    mag /= r;
  }
  double p = static_cast<double>(P.period());
  cplx d = std::polar(1.0, -0.5 * p * th) * (t00 + t11);
  // Entries of the product are bounded by 2^p prod 1/rho; use that scale.
  double scale = std::max(1.0, mag);
  if (std::abs(d.imag()) > 1e-10 * scale) {
    throw Error(ErrorKind::kNumeric, "CMV discriminant is not real on the circle");
  }
  return {d.real(), d.imag()};
}

namespace {

int sgn(double v) { return v >= 0.0 ? 1 : -1; }

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  int slo = sgn(f(lo));
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sgn(f(mid)) == slo) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

CircleSpectralSet cmv_band_arcs(const PeriodicVerblunsky& P) {
  P.validate();
  const std::size_t p = P.period();
  const double span = 2.0 * kTwoPi;
  auto D = [&](double t) { return cmv_discriminant(P, t).value; };
  auto sample = [&](std::size_t n) {
    std::vector<double> v(n + 1);
    parallel_for(n + 1, [&](std::size_t i) {
      v[i] = D(span * static_cast<double>(i) / static_cast<double>(n));
    });
    return v;
  };
  auto changes = [](const std::vector<double>& v) {
    std::size_t c = 0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      if (sgn(v[i] - 2.0) != sgn(v[i + 1] - 2.0)) ++c;
      if (sgn(v[i] + 2.0) != sgn(v[i + 1] + 2.0)) ++c;
    }
    return c;
  };
  std::size_t n = 64 * p;
  std::vector<double> vals = sample(n);
  std::size_t c_prev = changes(vals);
  int stable = 0;
  for (int round = 0; round < 10 && stable < 2; ++round) {
    std::vector<double> v2 = sample(2 * n);
    std::size_t c2 = changes(v2);
    stable = (c2 == c_prev) ? stable + 1 : 0;
    n *= 2;
    vals = std::move(v2);
    c_prev = c2;
  }
  if (stable < 2) {
    throw Error(ErrorKind::kNumeric, "band edge bracketing did not stabilize at scan resolution " +
                                         std::to_string(n) + " points");
  }
  std::vector<double> cuts{0.0};
  double h = span / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t0 = h * static_cast<double>(i), t1 = h * static_cast<double>(i + 1);
    for (double level : {2.0, -2.0}) {
      if (sgn(vals[i] - level) != sgn(vals[i + 1] - level)) {
        cuts.push_back(vals[i] == level ? t0
                                        : bisect([&](double t) { return D(t) - level; }, t0, t1));
      }
    }
  }
  cuts.push_back(span);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Interval> bands;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (std::abs(D(0.5 * (cuts[i] + cuts[i + 1]))) <= 2.0) {
      if (!bands.empty() && cuts[i] - bands.back().hi < 1e-6 &&
          std::abs(std::abs(D(0.5 * (bands.back().hi + cuts[i]))) - 2.0) < 1e-9) {
        bands.back().hi = cuts[i + 1];   // closed gap
      } else {
        bands.push_back({cuts[i], cuts[i + 1]});
      }
    }
  }
  std::vector<Arc> arcs;
  for (const auto& b : bands) {
    if (b.length() >= kTwoPi) return CircleSpectralSet::full_circle();
    double lo = wrap_angle(b.lo);
    arcs.push_back({lo, lo + b.length()});
  }
  return CircleSpectralSet::from(arcs, {});
}

namespace {

cplx determinant(std::vector<cplx> A, std::size_t k) {
  cplx det(1.0, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r) {
      if (std::abs(A[r * k + c]) > std::abs(A[piv * k + c])) piv = r;
    }
    if (A[piv * k + c] == cplx(0.0, 0.0)) return {0.0, 0.0};
    if (piv != c) {
      for (std::size_t j = 0; j < k; ++j) std::swap(A[piv * k + j], A[c * k + j]);
      det = -det;
    }
    cplx d = A[c * k + c];
    det *= d;
    for (std::size_t r = c + 1; r < k; ++r) {
      cplx f = A[r * k + c] / d;
      if (f == cplx(0.0, 0.0)) continue;
      for (std::size_t j = c; j < k; ++j) A[r * k + j] -= f * A[c * k + j];
    }
  }
  return det;
}

}  // namespace

std::vector<double> unitary_eigen_angles(const std::vector<cplx>& U, std::size_t k,
                                         double tol) {
  if (k == 0 || U.size() != k * k) throw Error(ErrorKind::kDomain, "unitary block must be k x k with k >= 1");
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      cplx s(0.0, 0.0);
      for (std::size_t r = 0; r < k; ++r) s += std::conj(U[r * k + i]) * U[r * k + j];
      if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-10) {
        throw Error(ErrorKind::kDomain, "block is not unitary: eigenvalues would leave the circle");
      }
    }
  }
  if (k == 1) return {wrap_angle(std::arg(U[0]))};
  const cplx det_u = determinant(U, k);
  const double kd = static_cast<double>(k);
  const cplx norm = std::polar(1.0, -0.5 * std::arg(det_u) - 0.5 * kPi * kd);
  auto g = [&](double t) {
    std::vector<cplx> A(k * k);
    cplx z = std::polar(1.0, t);
    for (std::size_t i = 0; i < k * k; ++i) A[i] = -U[i];
    for (std::size_t i = 0; i < k; ++i) A[i * k + i] += z;
    return (std::polar(1.0, -0.5 * kd * t) * norm * determinant(A, k)).real();
  };
  const double scale = std::pow(2.0, kd);
  for (std::size_t grid = std::max<std::size_t>(256, 64 * k); grid <= (1u << 20); grid *= 4) {
    const double start = 0.3819660112501051 * kTwoPi / static_cast<double>(grid);
    const double h = kTwoPi / static_cast<double>(grid);
    std::vector<double> v(grid + 1);
    for (std::size_t i = 0; i <= grid; ++i) v[i] = g(start + h * static_cast<double>(i));
    std::vector<double> roots;
    for (std::size_t i = 0; i < grid; ++i) {
      double t0 = start + h * static_cast<double>(i);
      if ((v[i] >= 0.0) != (v[i + 1] >= 0.0)) {
        roots.push_back(bisect(g, t0, t0 + h));
      } else if (i > 0 && (v[i - 1] >= 0.0) == (v[i] >= 0.0) &&
                 std::abs(v[i]) <= std::abs(v[i - 1]) &&
                 std::abs(v[i]) <= std::abs(v[i + 1])) {
        // Even-multiplicity zero: golden-section search on |g|.
        double a = t0 - h, b = t0 + h;
        const double r = 0.6180339887498949;
        while (b - a > tol) {
          double c = b - r * (b - a), d = a + r * (b - a);
          if (std::abs(g(c)) < std::abs(g(d))) b = d;
          else a = c;
        }
        double t = 0.5 * (a + b);
        if (std::abs(g(t)) < 1e-8 * scale) {
          roots.push_back(t);
          roots.push_back(t);
        }
      }
    }
    if (roots.size() == k) {
      for (auto& t : roots) {
        t = wrap_angle(t);
        if (kTwoPi - t < 1e-12) t = 0.0;
      }
      std::sort(roots.begin(), roots.end());
      return roots;
    }
  }
  throw Error(ErrorKind::kNumeric, "unitary block eigenvalue count mismatch");
}

void write_triplets(std::ostream& out, const FiniteCMV& C) {
  out << "row,col,re,im\n";
  out.precision(17);
  for (std::size_t i = 0; i < C.order; ++i) {
    for (std::size_t j = (i >= 2 ? i - 2 : 0); j < std::min(C.order, i + 3); ++j) {
      cplx v = C.at(i, j);
      if (v == cplx(0.0, 0.0)) continue;
      out << i << ',' << j << ',' << v.real() << ',' << v.imag() << '\n';
    }
  }
}

}  // namespace esslab
