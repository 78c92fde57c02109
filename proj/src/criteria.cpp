#include "esslab/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "esslab/error.hpp"

namespace esslab {

using nlohmann::json;

TargetSet TargetSet::line(std::vector<double> x) {
  TargetSet t;
  t.real = std::move(x);
  t.validate();
  return t;
}

TargetSet TargetSet::circle(std::vector<cplx> lambda) {
  TargetSet t;
  t.unimodular = std::move(lambda);
  t.validate();
  return t;
}

void TargetSet::validate() const {
  if (!real.empty() && !unimodular.empty()) {
    throw Error(ErrorKind::kKindMismatch, "targets mix real and unimodular values");
  }
  if (size() == 0) throw Error(ErrorKind::kDomain, "empty target set");
  for (std::size_t i = 0; i < real.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (real[i] == real[j]) throw Error(ErrorKind::kDomain, "repeated target");
    }
  }
  for (std::size_t i = 0; i < unimodular.size(); ++i) {
    if (std::abs(std::abs(unimodular[i]) - 1.0) > 1e-12) {
      throw Error(ErrorKind::kDomain, "circle target is not unimodular");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (unimodular[i] == unimodular[j]) throw Error(ErrorKind::kDomain, "repeated target");
    }
  }
}

// ---------------------------------------------------------------------------
// Krein and Chihara

namespace {

void require_jacobi(const ScenarioSpec& spec) {
  if (spec.family != Family::kJacobi) {
    throw Error(ErrorKind::kKindMismatch, "criterion needs a Jacobi scenario");
  }
}

// Rows first..last (1-based) with a one-row margin on both sides.
struct RowTable {
  long first = 1;
  std::vector<double> a, b;   // index r - first + 1

  double A(long r) const {
    if (r < 1) return 0.0;
    return a[static_cast<std::size_t>(r - first + 1)];
  }
  double B(long r) const { return b[static_cast<std::size_t>(r - first + 1)]; }
};

RowTable rows(const ScenarioSpec& spec, long first, long last) {
  RowTable t;
  t.first = first;
  long lo = first - 1;
  for (long r = lo; r <= last + 1; ++r) {
    if (r < 1) {
      t.a.push_back(0.0);
      t.b.push_back(0.0);
      continue;
    }
    StreamValue v = stream_value(spec, r - 1);
    t.a.push_back(v.a);
    t.b.push_back(v.b);
  }
  return t;
}

// Row n of prod_j (J - x_j), applied to delta_n on rows n-l..n+l.
std::vector<double> band_entries(const RowTable& t, const std::vector<double>& x, long n) {
  const long l = static_cast<long>(x.size());
  const long lo = n - l, hi = n + l;
  std::vector<double> v(static_cast<std::size_t>(2 * l + 1), 0.0), w(v.size());
  v[static_cast<std::size_t>(l)] = 1.0;
  for (double xj : x) {
    for (long r = lo; r <= hi; ++r) {
      std::size_t i = static_cast<std::size_t>(r - lo);
      if (r < 1) {
        w[i] = 0.0;
        continue;
      }
      double s = (t.B(r) - xj) * v[i];
      if (r > lo && r - 1 >= 1) s += t.A(r - 1) * v[i - 1];
      if (r < hi) s += t.A(r) * v[i + 1];
      w[i] = s;
    }
    std::swap(v, w);
  }
  return v;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Shared verdict rule over rows [N/2, N] with a dyadic decay profile.
template <class RowSup>
Verdict tail_verdict(const std::string& name, long N, double tol, RowSup row_sup) {
  if (N < 100) throw Error(ErrorKind::kDomain, "horizon must be at least 100");
  Verdict v;
  v.criterion = name;
  std::vector<long> horizons;
  for (long h = N; h >= 16; h /= 2) horizons.push_back(h);
  std::reverse(horizons.begin(), horizons.end());
  for (long h : horizons) {
    double s = 0.0;
    for (long r = h / 2; r <= h; ++r) s = std::max(s, row_sup(r));
    v.decay_profile.push_back({h, s});
  }
  bool tail_fails = false;
  for (long r = N / 2; r <= N && !tail_fails; ++r) tail_fails = row_sup(r) >= tol;
  if (tail_fails) {
    // Report the first offending row of the whole horizon.
    for (long r = 1; r <= N; ++r) {
      if (row_sup(r) >= tol) {
        v.witness = r;
        break;
      }
    }
    return v;
  }
  for (std::size_t i = 1; i < v.decay_profile.size(); ++i) {
    const auto& prev = v.decay_profile[i - 1];
    const auto& cur = v.decay_profile[i];
    if (cur.sup > prev.sup * (1.0 + 1e-9) + 1e-300) {
      for (long r = cur.row / 2; r <= cur.row; ++r) {
        if (row_sup(r) == cur.sup) {
          v.witness = r;
          break;
        }
      }
      v.warnings.push_back("band entries below tolerance but not decreasing");
      return v;
    }
  }
  v.holds = true;
  return v;
}

}  // namespace

std::vector<double> krein_band_entries(const ScenarioSpec& spec, const TargetSet& targets,
                                       long n) {
  require_jacobi(spec);
  targets.validate();
  if (targets.real.empty()) throw Error(ErrorKind::kKindMismatch, "Jacobi criterion needs real targets");
  if (n < 1) throw Error(ErrorKind::kIndex, "rows are 1-based");
  const long l = static_cast<long>(targets.real.size());
  return band_entries(rows(spec, std::max(1L, n - l), n + l), targets.real, n);
}

Verdict krein_check(const ScenarioSpec& spec, const TargetSet& targets, long N, double tol) {
  require_jacobi(spec);
  targets.validate();
  if (targets.real.empty()) throw Error(ErrorKind::kKindMismatch, "Jacobi criterion needs real targets");
  const long l = static_cast<long>(targets.real.size());
  // Row sups from one pass over a table of rows 1..N.
  RowTable t = rows(spec, 1, N + l + 1);
  std::vector<double> sup(static_cast<std::size_t>(N + 1), 0.0);
  for (long n = 1; n <= N; ++n) sup[static_cast<std::size_t>(n)] = max_abs(band_entries(t, targets.real, n));
  return tail_verdict("krein", N, tol, [&](long r) { return sup[static_cast<std::size_t>(r)]; });
}

std::array<double, 3> chihara_residuals(const ScenarioSpec& spec, double x1, double x2,
                                        long n) {
  require_jacobi(spec);
  if (n < 1) throw Error(ErrorKind::kIndex, "rows are 1-based");
  RowTable t = rows(spec, n, n + 1);
  double an = t.A(n), am = t.A(n - 1), an1 = t.A(n + 1);
  double bn = t.B(n), bn1 = t.B(n + 1);
  return {an * an + am * am + (bn - x1) * (bn - x2), an * (bn + bn1 - x1 - x2), an * an1};
}

Verdict chihara_check(const ScenarioSpec& spec, double x1, double x2, long N, double tol) {
  require_jacobi(spec);
  RowTable t = rows(spec, 1, N + 2);
  auto row_sup = [&](long n) {
    double an = t.A(n), am = t.A(n - 1), an1 = t.A(n + 1);
    double bn = t.B(n), bn1 = t.B(n + 1);
    return std::max({std::abs(an * an + am * am + (bn - x1) * (bn - x2)),
                     std::abs(an * (bn + bn1 - x1 - x2)), std::abs(an * an1)});
  };
  return tail_verdict("chihara", N, tol, row_sup);
}

json to_json(const Verdict& v) {
  json profile = json::array();
  for (const auto& p : v.decay_profile) profile.push_back({p.row, p.sup});
  json j{{"criterion", v.criterion},
         {"verdict", v.holds ? "holds" : "fails"},
         {"witness", v.holds ? json(nullptr) : json(v.witness)},
         {"decay_profile", profile}};
  if (!v.warnings.empty()) j["warnings"] = v.warnings;
  return j;
}

// ---------------------------------------------------------------------------
// Limit forms

LimitFormResult limit_form_check(const JacobiTable& L, double x1, double x2, double tol) {
  const std::size_t N = L.b.size();
  if (L.a.size() != N) throw Error(ErrorKind::kWindow, "a and b tables differ in length");
  if (N < 3) throw Error(ErrorKind::kWindow, "limit table needs at least 3 sites");
  LimitFormResult r;
  for (std::size_t n = 1; n + 2 <= N; ++n) {
    const double am = L.a[n - 1], an = L.a[n], an1 = L.a[n + 1];
    const double bn = L.b[n], bn1 = L.b[n + 1];
    // Block form.
    double ra = std::abs(an * an1);
    if (an == 0.0 && am == 0.0) ra = std::max(ra, std::min(std::abs(bn - x1), std::abs(bn - x2)));
    if (an != 0.0) {
      ra = std::max(ra, std::abs(bn + bn1 - x1 - x2));
      ra = std::max(ra, std::abs(bn * bn1 - an * an - x1 * x2));
    }
    r.residual_a = std::max(r.residual_a, ra);
    // Band form.
    double rb = std::max({std::abs(am * am + an * an + (bn - x1) * (bn - x2)),
                          std::abs(an * (bn + bn1 - x1 - x2)), std::abs(an * an1)});
    r.residual_b = std::max(r.residual_b, rb);
  }
  r.holds_a = r.residual_a <= tol;
  r.holds_b = r.residual_b <= tol;
  r.equivalent = r.holds_a == r.holds_b;
  return r;
}

namespace {

double rho2(cplx a) {
  double m = std::abs(a);
  return std::max(0.0, (1.0 - m) * (1.0 + m));
}

}  // namespace

LimitFormResult cmv_limit_form_check(const std::vector<cplx>& al, cplx l1, cplx l2,
                                     double tol) {
  const std::size_t N = al.size();
  if (N < 4) throw Error(ErrorKind::kWindow, "limit table needs at least 4 sites");
  for (const auto& a : al) {
    if (std::abs(a) > 1.0 + 1e-12) throw Error(ErrorKind::kDomain, "coefficient outside the closed disk");
  }
  LimitFormResult r;
  for (std::size_t n = 1; n + 2 <= N; ++n) {
    const cplx am = al[n - 1], an = al[n], an1 = al[n + 1];
    const double rn = rho2(an), rn1 = rho2(an1);
    const cplx g_n = -std::conj(an) * am;
    const cplx g_n1 = -std::conj(an1) * an;
    // Block form.
    double ra = rn * rn1;
    if (rn <= tol && rn1 <= tol) ra = std::max(ra, std::min(std::abs(g_n1 - l1), std::abs(g_n1 - l2)));
    if (rn > tol) {
      ra = std::max(ra, std::abs(g_n + g_n1 - l1 - l2));
      ra = std::max(ra, std::abs(am * std::conj(an1) - l1 * l2));
    }
    r.residual_a = std::max(r.residual_a, ra);
    // Band form.
    double rb = std::max(rn * rn1, rn * std::abs(g_n + g_n1 - l1 - l2));
    if (n >= 2) {
      const cplx amm = al[n - 2];
      const double rm = rho2(am);
      cplx d = (g_n - l1) * (g_n - l2) - rn * std::conj(an1) * am - rm * std::conj(an) * amm;
      rb = std::max(rb, std::abs(d));
    }
    r.residual_b = std::max(r.residual_b, rb);
  }
  r.holds_a = r.residual_a <= tol;
  r.holds_b = r.residual_b <= tol;
  r.equivalent = r.holds_a == r.holds_b;
  return r;
}

// ---------------------------------------------------------------------------
// Golinskii tail set

GolinskiiResult golinskii_decay_spectrum(const ScenarioSpec& spec, long horizon,
                                         double cluster_gap) {
  if (spec.family != Family::kCmv) throw Error(ErrorKind::kKindMismatch, "needs a CMV scenario");
  if (horizon < 4) throw Error(ErrorKind::kDomain, "horizon too small");
  GolinskiiResult out;
  const long lo = horizon / 2;
  std::vector<StreamValue> seg = stream_segment(spec, lo, horizon - lo + 2);
  double worst = 0.0;
  std::vector<double> ang;
  std::vector<long> idx;
  for (std::size_t i = 0; i + 1 < seg.size(); ++i) {
    worst = std::max(worst, 1.0 - std::abs(seg[i].alpha));
    cplx v = -std::conj(seg[i + 1].alpha) * seg[i].alpha;
    if (std::abs(v) == 0.0) continue;
    ang.push_back(wrap_angle(std::arg(v)));
    idx.push_back(lo + static_cast<long>(i));
  }
  if (worst > 0.1) {
    std::ostringstream os;
    os << "hypothesis violated: max 1-|alpha| over the tail is " << worst;
    out.warnings.push_back(os.str());
  }
  if (ang.empty()) return out;
  // Sort by angle and cut the circle at its widest gap.
  std::vector<std::size_t> order(ang.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return ang[x] < ang[y] || (ang[x] == ang[y] && idx[x] < idx[y]);
  });
  const std::size_t m = order.size();
  std::size_t cut = 0;
  double widest = -1.0;
  for (std::size_t i = 0; i < m; ++i) {
    double g = i + 1 < m ? ang[order[i + 1]] - ang[order[i]] : ang[order[0]] + kTwoPi - ang[order[i]];
    if (g > widest) {
      widest = g;
      cut = (i + 1) % m;
    }
  }
  std::vector<Arc> arcs;
  std::vector<double> pts;
  std::size_t start = 0;
  while (start < m) {
    std::size_t end = start;
    auto at = [&](std::size_t k) {
      double a = ang[order[(cut + k) % m]];
      return cut + k >= m ? a + kTwoPi : a;
    };
    while (end + 1 < m && at(end + 1) - at(end) <= cluster_gap) ++end;
    double lo_a = at(start), hi_a = at(end);
    if (hi_a - lo_a <= cluster_gap) {
      // Best estimate of the limit: the value from the latest index.
      std::size_t best = start;
      for (std::size_t k = start; k <= end; ++k) {
        if (idx[order[(cut + k) % m]] > idx[order[(cut + best) % m]]) best = k;
      }
      pts.push_back(wrap_angle(at(best)));
    } else {
      arcs.push_back({wrap_angle(lo_a), wrap_angle(lo_a) + (hi_a - lo_a)});
    }
    start = end + 1;
  }
  out.set = CircleSpectralSet::from(arcs, pts);
  return out;
}

// ---------------------------------------------------------------------------
// Finite blocks

std::vector<cplx> cmv_pair_block(cplx prev, cplx mid, cplx next) {
  ThetaBlock t = theta(mid);
  auto m = t.matrix();
  const cplx d0 = -prev, d1 = std::conj(next);
  return {m[0] * d0, m[1] * d1, m[2] * d0, m[3] * d1};
}

std::vector<double> finite_block_eigs(const FiniteJacobi& block) {
  return eigenvalues(block);
}

std::vector<cplx> finite_block_eigs(const std::vector<cplx>& block, std::size_t k) {
  std::vector<cplx> out;
  for (double t : unitary_eigen_angles(block, k)) out.push_back(std::polar(1.0, t));
  return out;
}

}  // namespace esslab
