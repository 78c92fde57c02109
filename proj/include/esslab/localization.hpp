#pragma once

// Tent partition of unity on the lattice, the commutator operator it
// produces against a Jacobi matrix, and selection of a localized trial
// vector with controlled residual.

#include <vector>

#include "esslab/jacobi.hpp"
#include "esslab/sequences.hpp"

namespace esslab {

struct TentPartition {
  long L = 0;
  std::vector<double> psi;   // psi_L(1..2L-1)
  double c = 0.0;            // (sum psi^2)^{1/2}
  bool degenerate = false;   // L = 1: the tent vanishes identically

  /// psi_L(n), zero outside 1..2L-1.
  double at(long n) const;
  /// j_{alpha,L}(n) = psi_L(n - alpha) / c.
  double j(long alpha, long n) const;
};

/// psi_L(n) = (n-1)/L on 1..L, (2L-1-n)/L on L..2L-1. kDomain for L < 1.
TentPartition tent_values(long L);

struct PartitionResidual {
  double residual = 0.0;     // sup_n |sum_alpha j_alpha(n)^2 - 1|
  bool boundary = false;     // range closer than 2L to the first site
  std::vector<double> sums;  // the sums, one per site in the range
};

/// Sum over alpha >= 0 of j_{alpha,L}(n)^2 for sites n in [first, last]
/// (1-based, the stream starts at site 1).
PartitionResidual partition_identity_residual(long L, long first, long last);

/// C = 2 sum_alpha [j_alpha, J]^* [j_alpha, J] on a finite Jacobi window, with
/// tents on all integer alpha so that sum_alpha j_alpha^2 = 1 on the window.
/// Stored by bands: diag[i], off2[i] = C(i, i+2) (the +-1 bands vanish).
struct CommutatorOperator {
  std::vector<double> diag;
  std::vector<double> off2;

  std::vector<double> apply(const std::vector<double>& x) const;
  double quadratic_form(const std::vector<double>& x) const;
};

CommutatorOperator commutator_operator(const FiniteJacobi& M, const TentPartition& tent);

struct NormEstimate {
  double norm = 0.0;
  double norm_L2 = 0.0;   // norm * L^2
  int iterations = 0;
  std::vector<double> history;   // Rayleigh quotients, for diagnostics
};

/// Largest eigenvalue of a nonnegative banded operator by power iteration
/// from a seeded start vector; stops when the relative change drops below
/// rel_tol. kNumeric after max_iter iterations.
NormEstimate power_iteration_norm(const CommutatorOperator& C, double rel_tol = 1e-8,
                                  int max_iter = 200000);

/// ||C|| for the window of stream entries [start, start + length); the
/// window must hold at least 8L sites (kWindow).
NormEstimate commutator_C_norm(const ScenarioSpec& spec, long L, long start, long length);

struct LocalizedTrial {
  long alpha = 0;
  std::vector<double> vector;   // j_alpha phi
  double ratio = 0.0;           // ||(J - lambda) j_alpha phi|| / ||j_alpha phi||
  double base_ratio = 0.0;      // ||(J - lambda) phi|| / ||phi||
  double c_norm = 0.0;          // ||C|| on the window
  double rayleigh = 0.0;        // <phi, C phi> / ||phi||^2
  /// ratio^2 <= 2 base_ratio^2 + rayleigh <= 2 base_ratio^2 + ||C||.
  double slack = 0.0;           // 2 base_ratio^2 + ||C|| - ratio^2
  bool bound_holds = false;
};

/// Scans all tent translates meeting the support of phi and keeps the one
/// with the smallest residual ratio (ties to the smallest alpha). kSupport
/// when phi vanishes.
LocalizedTrial localize_trial(const FiniteJacobi& M, double lambda,
                              const std::vector<double>& phi, long L);

/// ||(M - lambda) x|| over the whole window.
double residual_norm(const FiniteJacobi& M, double lambda, const std::vector<double>& x);

}  // namespace esslab
