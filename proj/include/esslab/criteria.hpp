#pragma once

// Finite essential spectrum criteria: Krein compactness of P(J), the
// three-term Chihara conditions, their two-sided limit forms, and the CMV
// analogs (tail products of Verblunsky coefficients, block conditions).

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "esslab/cmv.hpp"
#include "esslab/jacobi.hpp"
#include "esslab/sequences.hpp"
#include "esslab/spectra.hpp"

namespace esslab {

/// Distinct target points: reals for Jacobi, unimodular numbers for CMV.
struct TargetSet {
  std::vector<double> real;
  std::vector<cplx> unimodular;

  static TargetSet line(std::vector<double> x);
  static TargetSet circle(std::vector<cplx> lambda);
  std::size_t size() const { return real.empty() ? unimodular.size() : real.size(); }
  /// kDomain on empty, repeated or (circle) non-unimodular targets.
  void validate() const;
};

/// Row n (1-based) of P(J) = prod_j (J - x_j): entries at columns n-l..n+l,
/// zeros where the column falls before the first row.
std::vector<double> krein_band_entries(const ScenarioSpec& spec, const TargetSet& targets,
                                       long n);

struct DecayPoint {
  long row = 0;        // dyadic horizon h; the sup runs over rows [h/2, h]
  double sup = 0.0;
};

struct Verdict {
  std::string criterion;
  bool holds = false;
  long witness = 0;    // first offending row when the check fails, else 0
  std::vector<DecayPoint> decay_profile;
  std::vector<std::string> warnings;
};

nlohmann::json to_json(const Verdict& v);

/// Holds iff the sup of |P(J)| band entries over rows [N/2, N] is below tol
/// and the sups over dyadic sub-horizons do not increase. N >= 100. On
/// failure the witness is the first row in [1, N] with an entry >= tol.
Verdict krein_check(const ScenarioSpec& spec, const TargetSet& targets, long N,
                    double tol = 1e-3);

/// The three quantities whose vanishing is the Chihara condition at row n:
/// a_n^2 + a_{n-1}^2 + (b_n - x1)(b_n - x2), a_n (b_n + b_{n+1} - x1 - x2),
/// a_n a_{n+1}.
std::array<double, 3> chihara_residuals(const ScenarioSpec& spec, double x1, double x2,
                                        long n);

/// Same verdict rule as krein_check applied to the Chihara residuals.
Verdict chihara_check(const ScenarioSpec& spec, double x1, double x2, long N,
                      double tol = 1e-3);

/// Two-sided Jacobi data on a window: b[i] at site i, a[i] couples i, i+1.
struct JacobiTable {
  std::vector<double> a;
  std::vector<double> b;
};

struct LimitFormResult {
  bool holds_a = false;       // block form: 1x1 blocks at x_j, 2x2 blocks with eigenvalues x1, x2
  bool holds_b = false;       // band form: the three identities of P(J) = 0
  bool equivalent = false;
  double residual_a = 0.0;    // largest violation found
  double residual_b = 0.0;
};

/// Block form: a_n a_{n+1} = 0; a_n = a_{n-1} = 0 => b_n in {x1, x2};
/// a_n != 0 => b_n + b_{n+1} = x1 + x2 and b_n b_{n+1} - a_n^2 = x1 x2.
/// Band form: a_{n-1}^2 + a_n^2 + (b_n - x1)(b_n - x2) = 0,
/// a_n (b_n + b_{n+1} - x1 - x2) = 0, a_n a_{n+1} = 0.
/// Both are evaluated on sites 1..size-2; the window should start and end at
/// a decoupling point, otherwise the forms see different halves of a cut
/// block.
LimitFormResult limit_form_check(const JacobiTable& limit, double x1, double x2,
                                 double tol = 1e-12);

/// Block form: rho_n rho_{n+1} = 0; rho_n = rho_{n+1} = 0 =>
/// -conj(alpha_{n+1}) alpha_n in {l1, l2}; rho_n != 0 => trace and determinant
/// of the 2x2 block match l1 + l2 and l1 l2.
/// Band form, from the diagonal and first two subdiagonals of
/// (G - l1)(G - l2) for the GGT matrix G:
/// rho_n^2 rho_{n+1}^2 = 0, rho_n^2 (G_nn + G_{n+1,n+1} - l1 - l2) = 0,
/// (G_nn - l1)(G_nn - l2) - rho_n^2 conj(a_{n+1}) a_{n-1}
///   - rho_{n-1}^2 conj(a_n) a_{n-2} = 0, with G_nn = -conj(a_n) a_{n-1}.
/// rho enters squared so that unimodular entries (rho of order sqrt(eps))
/// count as decoupling. Sites 1..size-2; the last identity from site 2.
LimitFormResult cmv_limit_form_check(const std::vector<cplx>& alpha, cplx l1, cplx l2,
                                     double tol = 1e-12);

struct GolinskiiResult {
  CircleSpectralSet set;
  std::vector<std::string> warnings;
};

/// Limit points of -conj(alpha_{j+1}) alpha_j estimated from j in
/// [horizon/2, horizon]: tight clusters become points, wide ones arcs.
GolinskiiResult golinskii_decay_spectrum(const ScenarioSpec& spec, long horizon,
                                         double cluster_gap = 1e-2);

/// The 2x2 decoupled CMV block on sites n, n+1 when alpha_{n-1}, alpha_{n+1}
/// are unimodular: Theta(alpha_n) diag(-alpha_{n-1}, conj(alpha_{n+1})).
std::vector<cplx> cmv_pair_block(cplx prev, cplx mid, cplx next);

/// Eigenvalues of a finite Jacobi block (ascending).
std::vector<double> finite_block_eigs(const FiniteJacobi& block);
/// Eigenvalues of a k x k unitary CMV block as unimodular numbers, sorted by
/// angle. kDomain when the block is not unitary.
std::vector<cplx> finite_block_eigs(const std::vector<cplx>& block, std::size_t k);

}  // namespace esslab
