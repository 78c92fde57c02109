#include "esslab/localization.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "esslab/error.hpp"
#include "esslab/parallel.hpp"

namespace esslab {

double TentPartition::at(long n) const {
  if (n < 1 || n > 2 * L - 1) return 0.0;
  return psi[static_cast<std::size_t>(n - 1)];
}

double TentPartition::j(long alpha, long n) const {
  if (degenerate) return 0.0;
  return at(n - alpha) / c;
}

TentPartition tent_values(long L) {
  if (L < 1) throw Error(ErrorKind::kDomain, "tent scale must be at least 1");
  TentPartition t;
  t.L = L;
  const double dL = static_cast<double>(L);
  double s = 0.0;
  for (long n = 1; n <= 2 * L - 1; ++n) {
    double v = n <= L ? static_cast<double>(n - 1) / dL : static_cast<double>(2 * L - 1 - n) / dL;
    t.psi.push_back(v);
    s += v * v;
  }
  t.c = std::sqrt(s);
  t.degenerate = t.c == 0.0;
  return t;
}

PartitionResidual partition_identity_residual(long L, long first, long last) {
  if (first < 1 || last < first) throw Error(ErrorKind::kIndex, "site range must satisfy 1 <= first <= last");
  TentPartition t = tent_values(L);
  if (t.degenerate) throw Error(ErrorKind::kDomain, "degenerate tent (L = 1)");
  PartitionResidual r;
  r.boundary = first < 2 * L;
  for (long n = first; n <= last; ++n) {
    double s = 0.0;
    for (long a = std::max(0L, n - 2 * L + 1); a <= n - 1; ++a) {
      double v = t.j(a, n);
      s += v * v;
    }
    r.sums.push_back(s);
    r.residual = std::max(r.residual, std::abs(s - 1.0));
  }
  return r;
}

std::vector<double> CommutatorOperator::apply(const std::vector<double>& x) const {
  const std::size_t n = diag.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * x[i];
    if (i + 2 < n) s += off2[i] * x[i + 2];
    if (i >= 2) s += off2[i - 2] * x[i - 2];
    y[i] = s;
  }
  return y;
}

double CommutatorOperator::quadratic_form(const std::vector<double>& x) const {
  auto y = apply(x);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

CommutatorOperator commutator_operator(const FiniteJacobi& M, const TentPartition& tent) {
  M.validate();
  if (tent.degenerate) throw Error(ErrorKind::kDomain, "degenerate tent (L = 1)");
  const long W = static_cast<long>(M.size());
  CommutatorOperator C;
  C.diag.assign(static_cast<std::size_t>(W), 0.0);
  C.off2.assign(static_cast<std::size_t>(std::max(0L, W - 2)), 0.0);
  if (W < 2) return C;
  // Window sites 1..W; e_m = a_m (j(m+1) - j(m)) on the edge (m, m+1). The
  // commutator K has K(m, m+1) = -e_m, K(m+1, m) = e_m, so K^T K has
  // diagonal e_{m-1}^2 + e_m^2 and (m, m+2) entry -e_m e_{m+1}.
  const long L = tent.L;
  for (long alpha = 1 - (2 * L - 1); alpha <= W - 1; ++alpha) {
    long lo = std::max(1L, alpha), hi = std::min(W - 1, alpha + 2 * L - 1);
    if (lo > hi) continue;
    std::vector<double> e(static_cast<std::size_t>(W + 1), 0.0);
    for (long m = lo; m <= hi; ++m) {
      e[static_cast<std::size_t>(m)] =
          M.a[static_cast<std::size_t>(m - 1)] * (tent.j(alpha, m + 1) - tent.j(alpha, m));
    }
    for (long m = lo; m <= hi; ++m) {
      double em = e[static_cast<std::size_t>(m)];
      if (em == 0.0) continue;
      C.diag[static_cast<std::size_t>(m - 1)] += 2.0 * em * em;
      C.diag[static_cast<std::size_t>(m)] += 2.0 * em * em;
      if (m + 1 <= W - 1) {
        C.off2[static_cast<std::size_t>(m - 1)] -= 2.0 * em * e[static_cast<std::size_t>(m + 1)];
      }
    }
  }
  return C;
}

NormEstimate power_iteration_norm(const CommutatorOperator& C, double rel_tol, int max_iter) {
  const std::size_t n = C.diag.size();
  NormEstimate est;
  if (n == 0) return est;
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> U(0.5, 1.5);
  std::vector<double> x(n);
  for (auto& v : x) v = U(rng);
  auto normalize = [](std::vector<double>& v) {
    double s = 0.0;
    for (double t : v) s += t * t;
    s = std::sqrt(s);
    if (s > 0.0) {
      for (double& t : v) t /= s;
    }
    return s;
  };
  normalize(x);
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<double> y = C.apply(x);
    double rq = 0.0;
    for (std::size_t i = 0; i < n; ++i) rq += x[i] * y[i];
    if (it % 64 == 0 || it < 64) est.history.push_back(rq);
    double s = normalize(y);
    if (s == 0.0) {
      est.norm = 0.0;
      est.iterations = it;
      return est;
    }
    x = std::move(y);
    if (it > 1 && std::abs(rq - prev) <= rel_tol * std::abs(rq)) {
      est.norm = rq;
      est.iterations = it;
      return est;
    }
    prev = rq;
  }
  std::ostringstream os;
  os << "power iteration did not converge in " << max_iter << " iterations; last iterates:";
  std::size_t k = est.history.size();
  for (std::size_t i = k > 5 ? k - 5 : 0; i < k; ++i) os << ' ' << est.history[i];
  throw Error(ErrorKind::kNumeric, os.str());
}

NormEstimate commutator_C_norm(const ScenarioSpec& spec, long L, long start, long length) {
  if (length < 8 * L) throw Error(ErrorKind::kWindow, "window must hold at least 8L sites");
  FiniteJacobi M = truncate_at(spec, start, static_cast<std::size_t>(length));
  NormEstimate est = power_iteration_norm(commutator_operator(M, tent_values(L)));
  est.norm_L2 = est.norm * static_cast<double>(L) * static_cast<double>(L);
  return est;
}

namespace {

std::vector<double> apply_shifted(const FiniteJacobi& M, double lambda,
                                  const std::vector<double>& x) {
  const std::size_t n = M.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = (M.b[i] - lambda) * x[i];
    if (i > 0) s += M.a[i - 1] * x[i - 1];
    if (i + 1 < n) s += M.a[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

double norm2(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

double residual_norm(const FiniteJacobi& M, double lambda, const std::vector<double>& x) {
  return norm2(apply_shifted(M, lambda, x));
}

LocalizedTrial localize_trial(const FiniteJacobi& M, double lambda,
                              const std::vector<double>& phi, long L) {
  M.validate();
  if (phi.size() != M.size()) throw Error(ErrorKind::kWindow, "trial vector and window differ in size");
  const double pn = norm2(phi);
  if (pn == 0.0) throw Error(ErrorKind::kSupport, "trial vector vanishes");
  TentPartition tent = tent_values(L);
  if (tent.degenerate) throw Error(ErrorKind::kDomain, "degenerate tent (L = 1)");
  const long W = static_cast<long>(M.size());
  const long a_lo = 1 - (2 * L - 1), a_hi = W - 1;
  const std::size_t count = static_cast<std::size_t>(a_hi - a_lo + 1);

  std::vector<double> ratio(count, -1.0);
  parallel_for(count, [&](std::size_t k) {
    const long alpha = a_lo + static_cast<long>(k);
    std::vector<double> v(phi.size(), 0.0);
    bool any = false;
    for (long n = std::max(1L, alpha + 1); n <= std::min(W, alpha + 2 * L - 1); ++n) {
      double t = tent.j(alpha, n) * phi[static_cast<std::size_t>(n - 1)];
      v[static_cast<std::size_t>(n - 1)] = t;
      any = any || t != 0.0;
    }
    if (!any) return;
    ratio[k] = residual_norm(M, lambda, v) / norm2(v);
  });

  long best = -1;
  for (std::size_t k = 0; k < count; ++k) {
    if (ratio[k] < 0.0) continue;
    if (best < 0 || ratio[k] < ratio[static_cast<std::size_t>(best)]) best = static_cast<long>(k);
  }
  if (best < 0) throw Error(ErrorKind::kSupport, "every localized vector vanishes");

  LocalizedTrial out;
  out.alpha = a_lo + best;
  out.vector.assign(phi.size(), 0.0);
  for (long n = 1; n <= W; ++n) {
    out.vector[static_cast<std::size_t>(n - 1)] = tent.j(out.alpha, n) * phi[static_cast<std::size_t>(n - 1)];
  }
  out.ratio = ratio[static_cast<std::size_t>(best)];
  out.base_ratio = residual_norm(M, lambda, phi) / pn;
  CommutatorOperator C = commutator_operator(M, tent);
  out.rayleigh = C.quadratic_form(phi) / (pn * pn);
  out.c_norm = std::max(power_iteration_norm(C).norm, out.rayleigh);
  out.slack = 2.0 * out.base_ratio * out.base_ratio + out.c_norm - out.ratio * out.ratio;
  out.bound_holds = out.slack >= -1e-10 * (out.ratio * out.ratio + 1e-300);
  return out;
}

}  // namespace esslab
