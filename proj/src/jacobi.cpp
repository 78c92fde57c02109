#include "esslab/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>

#include "esslab/error.hpp"
#include "esslab/parallel.hpp"

namespace esslab {

void FiniteJacobi::validate() const {
  if (b.empty()) throw Error(ErrorKind::kDomain, "Jacobi matrix must have N >= 1");
  if (a.size() + 1 != b.size()) {
    throw Error(ErrorKind::kDomain, "Jacobi off-diagonal must have N-1 entries");
  }
  for (double x : a) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw Error(ErrorKind::kDomain, "Jacobi a must be finite and >= 0");
  }
  for (double x : b) {
    if (!std::isfinite(x)) throw Error(ErrorKind::kDomain, "Jacobi b must be finite");
  }
}

FiniteJacobi truncate_at(const ScenarioSpec& spec, long start, std::size_t N) {
  if (spec.family != Family::kJacobi) {
    throw Error(ErrorKind::kKindMismatch, "truncate needs a Jacobi scenario");
  }
  if (N == 0) throw Error(ErrorKind::kDomain, "truncation size must be >= 1");
  FiniteJacobi M;
  M.b.resize(N);
  M.a.resize(N - 1);
  for (std::size_t i = 0; i < N; ++i) {
    StreamValue v = stream_value(spec, start + static_cast<long>(i));
    M.b[i] = v.b;
    if (i + 1 < N) M.a[i] = v.a;
  }
  return M;
}

FiniteJacobi truncate(const ScenarioSpec& spec, std::size_t N) {
  return truncate_at(spec, 0, N);
}

std::pair<double, double> gershgorin(const FiniteJacobi& M) {
  double amax = 0.0;
  for (double x : M.a) amax = std::max(amax, std::abs(x));
  auto [bmin, bmax] = std::minmax_element(M.b.begin(), M.b.end());
  return {*bmin - 2.0 * amax, *bmax + 2.0 * amax};
}

namespace {

struct SturmData {
  const std::vector<double>& b;
  std::vector<double> a2;
  double pivmin;

  explicit SturmData(const FiniteJacobi& M) : b(M.b), a2(M.a.size()) {
    double m = 1.0;
    for (std::size_t i = 0; i < M.a.size(); ++i) {
      a2[i] = M.a[i] * M.a[i];
      m = std::max(m, a2[i]);
    }
    pivmin = std::numeric_limits<double>::min() * m;
  }

  long count(double x) const {
    long c = 0;
    double d = b[0] - x;
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0.0) ++c;
    for (std::size_t i = 1; i < b.size(); ++i) {
      d = (b[i] - x) - a2[i - 1] / d;
      if (std::abs(d) < pivmin) d = -pivmin;
      if (d < 0.0) ++c;
    }
    return c;
  }

  // Counts at kLanes abscissae at once; the independent chains overlap.
  static constexpr std::size_t kLanes = 8;
  void counts(const double* x, long* out) const {
    double d[kLanes];
    long c[kLanes];
    for (std::size_t k = 0; k < kLanes; ++k) {
      d[k] = b[0] - x[k];
      if (std::abs(d[k]) < pivmin) d[k] = -pivmin;
      c[k] = d[k] < 0.0;
    }
    for (std::size_t i = 1; i < b.size(); ++i) {
      const double bi = b[i], ai = a2[i - 1];
      for (std::size_t k = 0; k < kLanes; ++k) {
        double v = (bi - x[k]) - ai / d[k];
        if (std::abs(v) < pivmin) v = -pivmin;
        c[k] += v < 0.0;
        d[k] = v;
      }
    }
    for (std::size_t k = 0; k < kLanes; ++k) out[k] = c[k];
  }
};

}  // namespace

long sturm_count(const FiniteJacobi& M, double x) {
  M.validate();
  return SturmData(M).count(x);
}

std::vector<double> eigenvalues(const FiniteJacobi& M, double tol) {
  M.validate();
  if (!(tol > 0.0)) throw Error(ErrorKind::kDomain, "eigenvalue tolerance must be positive");
  const SturmData sd(M);
  const std::size_t n = M.size();
  auto [lo, hi] = gershgorin(M);
  double pad = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  lo -= pad;
  hi += pad;

  // Coarse counts give every eigenvalue an initial bracket.
  const std::size_t cells = std::max<std::size_t>(64, n / 8);
  std::vector<double> grid(cells + 1);
  std::vector<long> counts(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) grid[i] = lo + (hi - lo) * static_cast<double>(i) / cells;
  grid[cells] = hi;
  parallel_for(cells + 1, [&](std::size_t i) { counts[i] = sd.count(grid[i]); });
  counts[0] = 0;
  counts[cells] = static_cast<long>(n);

  std::vector<double> eig(n);
  constexpr std::size_t K = SturmData::kLanes;
  parallel_for((n + K - 1) / K, [&](std::size_t g) {
    double l[K], h[K], mid[K];
    long rank[K], cnt[K];
    bool live[K];
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t idx = std::min(g * K + k, n - 1);
      rank[k] = static_cast<long>(idx);
      // First grid point whose count exceeds the rank.
      auto it = std::upper_bound(counts.begin(), counts.end(), rank[k]);
      std::size_t j = static_cast<std::size_t>(it - counts.begin());
      l[k] = grid[j - 1];
      h[k] = grid[j];
      live[k] = true;
    }
    for (int iter = 0; iter < 200; ++iter) {
      bool any = false;
      for (std::size_t k = 0; k < K; ++k) {
        double width_tol = std::max(tol, 4.0 * std::numeric_limits<double>::epsilon() *
                                             std::max(std::abs(l[k]), std::abs(h[k])));
        mid[k] = 0.5 * (l[k] + h[k]);
        if (h[k] - l[k] <= width_tol || mid[k] <= l[k] || mid[k] >= h[k]) live[k] = false;
        any = any || live[k];
      }
      if (!any) break;
      sd.counts(mid, cnt);
      for (std::size_t k = 0; k < K; ++k) {
        if (!live[k]) continue;
        if (cnt[k] > rank[k]) h[k] = mid[k];
        else l[k] = mid[k];
      }
    }
    for (std::size_t k = 0; k < K && g * K + k < n; ++k) eig[g * K + k] = 0.5 * (l[k] + h[k]);
  });
  return eig;
}

// ---------------------------------------------------------------------------
// Periodic cores

void PeriodicJacobi::validate() const {
  if (b.empty() || a.size() != b.size()) {
    throw Error(ErrorKind::kDomain, "periodic Jacobi needs equal nonzero lengths of a and b");
  }
  for (double x : a) {
    if (!(x > 0.0) || !std::isfinite(x)) throw Error(ErrorKind::kDomain, "periodic Jacobi a must be positive");
  }
  for (double x : b) {
    if (!std::isfinite(x)) throw Error(ErrorKind::kDomain, "periodic Jacobi b must be finite");
  }
}

std::pair<double, double> discriminant_with_derivative(const PeriodicJacobi& P,
                                                       double x) {
  const std::size_t p = P.period();
  // M = A_j ... A_0 and its derivative.
  double m00 = 1, m01 = 0, m10 = 0, m11 = 1;
  double d00 = 0, d01 = 0, d10 = 0, d11 = 0;
  for (std::size_t j = 0; j < p; ++j) {
    double aj = P.a[j];
    double aprev = P.a[(j + p - 1) % p];
    double t = (x - P.b[j]) / aj;
    double s = -aprev / aj;
    // A = [[t, s], [1, 0]], A' = [[1/aj, 0], [0, 0]].
    double n00 = t * d00 + s * d10 + m00 / aj;
    double n01 = t * d01 + s * d11 + m01 / aj;
    d10 = d00;
    d11 = d01;
    d00 = n00;
    d01 = n01;
    double q00 = t * m00 + s * m10;
    double q01 = t * m01 + s * m11;
    m10 = m00;
    m11 = m01;
    m00 = q00;
    m01 = q01;
  }
  return {m00 + m11, d00 + d11};
}

double discriminant(const PeriodicJacobi& P, double x) {
  return discriminant_with_derivative(P, x).first;
}

namespace {

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tol = 0.0) {
  double flo = f(lo);
  for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Zero counts as positive so a grid point landing on a root yields one crossing.
int sign_of(double v) { return v >= 0.0 ? 1 : -1; }

}  // namespace

namespace {

// Number of eigenvalues below x of the period cell with periodic (sign = 1)
// or antiperiodic (sign = -1) closure. Sites 1..p-1 form a tridiagonal block
// T; site 0 couples to it through c = (a_0, 0, ..., 0, sign a_{p-1}). By
// Haynsworth inertia the count is that of T - x plus one when the Schur
// complement (b_0 - x) - c^T (T - x)^{-1} c is negative. kBatch independent
// evaluations run interleaved so the division chains overlap.
constexpr std::size_t kBatch = 8;

void cell_counts(const PeriodicJacobi& P, const double* sign, const double* x, double pivmin,
                 long* out) {
  const std::size_t p = P.period();
  if (p == 1) {
    for (std::size_t k = 0; k < kBatch; ++k) out[k] = x[k] > P.b[0] + 2.0 * sign[k] * P.a[0] ? 1 : 0;
    return;
  }
  // Inertia of the cell = inertia of its leading (p-1) block plus the sign of
  // the Schur complement det(cell - x) / det(block - x). The cell determinant
  // is (-1)^p prod(a) (Delta(x) - 2 sign), taken from the transfer product so
  // that no pivot enters it; the block determinant sign is (-1)^(negatives).
  long neg[kBatch] = {};
  double dprev[kBatch];
  for (std::size_t k = 0; k < kBatch; ++k) {
    double d = P.b[1] - x[k];
    if (std::abs(d) < pivmin) d = -pivmin;
    neg[k] = d < 0.0;
    dprev[k] = d;
  }
  for (std::size_t i = 2; i < p; ++i) {
    const double a2 = P.a[i - 1] * P.a[i - 1], b = P.b[i];
    for (std::size_t k = 0; k < kBatch; ++k) {
      double d = b - x[k] - a2 / dprev[k];
      if (std::abs(d) < pivmin) d = -pivmin;
      neg[k] += d < 0.0;
      dprev[k] = d;
    }
  }
  double m00[kBatch], m01[kBatch], m10[kBatch], m11[kBatch];
  for (std::size_t k = 0; k < kBatch; ++k) {
    m00[k] = m11[k] = 1.0;
    m01[k] = m10[k] = 0.0;
  }
  bool scaled[kBatch] = {};
  for (std::size_t j = 0; j < p; ++j) {
    const double inv_a = 1.0 / P.a[j], s = -P.a[(j + p - 1) % p] * inv_a, bj = P.b[j];
    for (std::size_t k = 0; k < kBatch; ++k) {
      double t = (x[k] - bj) * inv_a;
      double q00 = t * m00[k] + s * m10[k];
      double q01 = t * m01[k] + s * m11[k];
      m10[k] = m00[k];
      m11[k] = m01[k];
      m00[k] = q00;
      m01[k] = q01;
      if (std::abs(q00) > 0x1p200 || std::abs(q01) > 0x1p200) {
        m00[k] *= 0x1p-200;
        m01[k] *= 0x1p-200;
        m10[k] *= 0x1p-200;
        m11[k] *= 0x1p-200;
        scaled[k] = true;
      }
    }
  }
  for (std::size_t k = 0; k < kBatch; ++k) {
    double tr = m00[k] + m11[k];
    double cell = scaled[k] ? tr : tr - 2.0 * sign[k];
    if (p % 2 == 1) cell = -cell;
    if (neg[k] % 2 == 1) cell = -cell;
    out[k] = neg[k] + (cell < 0.0 ? 1 : 0);
  }
}

}  // namespace

RealSpectralSet band_spectrum(const PeriodicJacobi& P) {
  P.validate();
  const std::size_t p = P.period();
  double amax = *std::max_element(P.a.begin(), P.a.end());
  auto [bmin, bmax] = std::minmax_element(P.b.begin(), P.b.end());
  double lo = *bmin - 2.0 * amax, hi = *bmax + 2.0 * amax;
  double pad = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  lo -= pad;
  hi += pad;
  const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, amax * amax);

  // Band edges are the eigenvalues of the periodic and antiperiodic cells,
  // each found by bisection on the cell inertia.
  std::vector<double> edges(2 * p);
  const std::size_t groups = (2 * p + kBatch - 1) / kBatch;
  parallel_for(groups, [&](std::size_t g) {
    double sign[kBatch], l[kBatch], h[kBatch], mid[kBatch];
    long rank[kBatch], cnt[kBatch];
    bool live[kBatch];
    for (std::size_t k = 0; k < kBatch; ++k) {
      const std::size_t idx = std::min(g * kBatch + k, 2 * p - 1);
      sign[k] = idx < p ? 1.0 : -1.0;
      rank[k] = static_cast<long>(idx % p);  // find the (rank+1)-th eigenvalue
      l[k] = lo;
      h[k] = hi;
      live[k] = true;
    }
    for (int iter = 0; iter < 200; ++iter) {
      bool any = false;
      for (std::size_t k = 0; k < kBatch; ++k) {
        mid[k] = 0.5 * (l[k] + h[k]);
        if (mid[k] <= l[k] || mid[k] >= h[k]) live[k] = false;
        any = any || live[k];
      }
      if (!any) break;
      cell_counts(P, sign, mid, pivmin, cnt);
      for (std::size_t k = 0; k < kBatch; ++k) {
        if (!live[k]) continue;
        if (cnt[k] > rank[k]) h[k] = mid[k];
        else l[k] = mid[k];
      }
    }
    for (std::size_t k = 0; k < kBatch && g * kBatch + k < 2 * p; ++k) {
      edges[g * kBatch + k] = 0.5 * (l[k] + h[k]);
    }
  });
  std::sort(edges.begin(), edges.end());
  std::vector<Interval> bands;
  for (std::size_t k = 0; k < p; ++k) bands.push_back({edges[2 * k], edges[2 * k + 1]});
  // A double root of Delta = +-2 leaves a numerically tiny gap with |Delta|
  // still at 2 inside it; such closed gaps join their neighbouring bands.
  const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
  std::vector<Interval> merged{bands.front()};
  for (std::size_t k = 1; k < p; ++k) {
    double gap_lo = merged.back().hi, gap_hi = bands[k].lo;
    bool closed = gap_hi - gap_lo <= 1e-6 * scale &&
                  std::abs(discriminant(P, 0.5 * (gap_lo + gap_hi))) <= 2.0 + 1e-10;
    if (closed) merged.back().hi = bands[k].hi;
    else merged.push_back(bands[k]);
  }
  bands = std::move(merged);
  return RealSpectralSet::from(bands, {});
}

double weyl_residual(const FiniteJacobi& M, double lambda,
                     const std::vector<double>& phi) {
  M.validate();
  const std::size_t n = M.size();
  if (phi.size() != n) throw Error(ErrorKind::kSupport, "trial vector length differs from matrix size");
  if (n < 3 || phi.front() != 0.0 || phi.back() != 0.0) {
    throw Error(ErrorKind::kSupport, "trial vector must vanish on the window edges");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = (M.b[i] - lambda) * phi[i];
    if (i > 0) r += M.a[i - 1] * phi[i - 1];
    if (i + 1 < n) r += M.a[i] * phi[i + 1];
    num += r * r;
    den += phi[i] * phi[i];
  }
  if (den == 0.0) throw Error(ErrorKind::kSupport, "trial vector is zero");
  return std::sqrt(num / den);
}

const char* structure_tag(const TwoSidedJacobi& J) {
  switch (J.structure.index()) {
    case 0: return "periodic_core";
    case 1: return "diagonal";
    case 2: return "block_sum";
    case 3: return "localized";
    case 4: return "raw_window";
  }
  return "unknown";
}

std::vector<double> localized_bound_states(const LocalizedLimit& L, double tol) {
  const std::size_t w = std::max(L.a.size(), L.b.size());
  auto a_at = [&](long n) { return n >= 0 && static_cast<std::size_t>(n) < L.a.size() ? L.a[n] : 1.0; };
  auto b_at = [&](long n) { return n >= 0 && static_cast<std::size_t>(n) < L.b.size() ? L.b[n] : 0.0; };
  for (std::size_t i = 0; i < L.a.size(); ++i) {
    if (!(L.a[i] > 0.0)) throw Error(ErrorKind::kDomain, "localized perturbation needs a > 0");
  }
  // Mismatch of the solution decaying to the left against the one decaying
  // to the right, for x = z + 1/z outside [-2, 2] with |z| < 1.
  auto mismatch = [&](double x) {
    double disc = std::sqrt(x * x - 4.0);
    double z = x > 0 ? (x - disc) / 2.0 : (x + disc) / 2.0;
    double um = z, u = 1.0;
    for (long n = 0; n <= static_cast<long>(w); ++n) {
      double next = ((x - b_at(n)) * u - a_at(n - 1) * um) / a_at(n);
      um = u;
      u = next;
      double scale = std::max(std::abs(u), std::abs(um));
      if (scale > 1e100) {
        u /= scale;
        um /= scale;
      }
    }
    return u - z * um;
  };

  double bound = 2.0;
  for (long n = -1; n <= static_cast<long>(w); ++n) {
    bound = std::max(bound, std::abs(b_at(n)) + a_at(n - 1) + a_at(n));
  }
  double smax = std::sqrt(bound - 2.0) + 0.1;
  const int grid = 4000;
  std::vector<double> out;
  for (int side : {-1, 1}) {
    auto f = [&](double s) { return mismatch(side * (2.0 + s * s)); };
    double s_prev = 1e-9, f_prev = f(s_prev);
    for (int i = 1; i <= grid; ++i) {
      double s = smax * i / grid;
      double fs = f(s);
      if (sign_of(fs) != sign_of(f_prev)) {
        double root = fs == 0.0 ? s : bisect_root(f, s_prev, s, tol);
        out.push_back(side * (2.0 + root * root));
      }
      s_prev = s;
      f_prev = fs;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_csv(std::ostream& out, const FiniteJacobi& M) {
  out << "index,a,b\n";
  out.precision(17);
  for (std::size_t i = 0; i < M.size(); ++i) {
    out << i + 1 << ',';
    if (i < M.a.size()) out << M.a[i];
    out << ',' << M.b[i] << '\n';
  }
}

}  // namespace esslab
