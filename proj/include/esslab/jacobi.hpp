#pragma once

// Jacobi matrices: finite truncations, Sturm-count bisection, Floquet
// discriminant and band spectrum of periodic cores, two-sided limit
// descriptions, and trial-vector residuals.

#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "esslab/sequences.hpp"
#include "esslab/spectra.hpp"

namespace esslab {

/// Symmetric tridiagonal matrix with diagonal b (size N) and off-diagonal a
/// (size N-1, entries >= 0).
struct FiniteJacobi {
  std::vector<double> b;
  std::vector<double> a;

  std::size_t size() const { return b.size(); }
  void validate() const;
};

/// Principal truncation of size N using stream entries 0..N-1.
FiniteJacobi truncate(const ScenarioSpec& spec, std::size_t N);

/// Truncation built from stream entries start..start+N-1.
FiniteJacobi truncate_at(const ScenarioSpec& spec, long start, std::size_t N);

/// [min(b) - 2 max(a), max(b) + 2 max(a)].
std::pair<double, double> gershgorin(const FiniteJacobi& M);

/// Number of eigenvalues strictly below x.
long sturm_count(const FiniteJacobi& M, double x);

/// All eigenvalues in ascending order, each bracketed to width <= tol.
std::vector<double> eigenvalues(const FiniteJacobi& M, double tol = 1e-10);

struct PeriodicJacobi {
  std::vector<double> a;   // a[j] couples sites j and j+1; a[p-1] wraps around
  std::vector<double> b;

  std::size_t period() const { return b.size(); }
  void validate() const;
};

/// Trace of the period transfer matrix A_p(x) ... A_1(x).
double discriminant(const PeriodicJacobi& P, double x);
/// Discriminant and its x-derivative in one pass.
std::pair<double, double> discriminant_with_derivative(const PeriodicJacobi& P,
                                                       double x);

/// {x : |Delta(x)| <= 2} as at most p closed bands.
RealSpectralSet band_spectrum(const PeriodicJacobi& P);

/// ||(M - lambda) phi|| / ||phi||. phi must vanish on the first and last site
/// (kSupport otherwise) so that truncation boundaries do not contribute.
double weyl_residual(const FiniteJacobi& M, double lambda,
                     const std::vector<double>& phi);

// --- two-sided limit objects ------------------------------------------------

/// Multiplication operator by a set of diagonal values; entries equal to
/// +-inf become decoupled sites at infinity. `ranges` describes families of
/// constant diagonals whose value sweeps a whole interval.
struct DiagonalLimit {
  std::vector<double> values;
  std::vector<Interval> ranges;
  bool plus_inf = false;
  bool minus_inf = false;
};

/// Direct sum of finite blocks (a = 0 at the cuts), repeated by the rule.
struct BlockSumLimit {
  std::vector<FiniteJacobi> blocks;
  std::string rule;
};

/// Free background (a = 1, b = 0) with a finite perturbation: sites 0..w-1
/// carry b[i], a[i] couples i and i+1 (a has w entries).
struct LocalizedLimit {
  std::vector<double> a;
  std::vector<double> b;
};

/// Two-sided table; the spectrum is approximated by a central truncation.
struct RawWindowLimit {
  std::vector<double> a;
  std::vector<double> b;
};

using JacobiStructure = std::variant<PeriodicJacobi, DiagonalLimit, BlockSumLimit,
                                     LocalizedLimit, RawWindowLimit>;

struct TwoSidedJacobi {
  JacobiStructure structure;
  std::string label;
  /// Coefficient pattern the member repeats (site l holds pattern[l mod size]);
  /// empty when the member is not periodic.
  std::vector<StreamValue> pattern;
};

const char* structure_tag(const TwoSidedJacobi& J);

/// Eigenvalues outside [-2, 2] of a localized perturbation of the free
/// two-sided operator, from matching the decaying solutions at both ends.
std::vector<double> localized_bound_states(const LocalizedLimit& L,
                                           double tol = 1e-12);

/// CSV rows "index,a,b" with a empty in the last row.
void write_csv(std::ostream& out, const FiniteJacobi& M);

}  // namespace esslab
