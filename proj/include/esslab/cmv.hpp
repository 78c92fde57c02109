#pragma once

// CMV matrices: Theta blocks, the five-diagonal product LM, extended
// (two-sided) windows, the Szego recursion, zeros of paraorthogonal
// polynomials, and the Floquet discriminant of periodic Verblunsky sequences.

#include <array>
#include <iosfwd>
#include <utility>
#include <vector>

#include "esslab/sequences.hpp"
#include "esslab/spectra.hpp"

namespace esslab {

/// sqrt((1 - |alpha|)(1 + |alpha|)), accurate near |alpha| = 1.
double rho_of(cplx alpha);

struct ThetaBlock {
  cplx alpha;
  double rho = 1.0;

  /// Row-major [[conj(alpha), rho], [rho, -alpha]].
  std::array<cplx, 4> matrix() const;
};

/// |alpha| <= 1 + 1e-14 is clamped onto the closed disk; beyond that kDomain.
ThetaBlock theta(cplx alpha);

enum class Boundary { kTruncated, kParaorthogonal };

/// Finite CMV matrix stored by bands: entry (i, j) with |i - j| <= 2.
struct FiniteCMV {
  std::size_t order = 0;
  Boundary boundary = Boundary::kTruncated;
  std::vector<cplx> band;   // band[5 * i + (j - i + 2)]

  cplx at(std::size_t i, std::size_t j) const;
  /// Row-major dense copy (tests and small blocks).
  std::vector<cplx> dense() const;
};

/// C = L M with L = Theta_0 + Theta_2 + ..., M = 1 + Theta_1 + Theta_3 + ...
/// The block touching the last row is cut to its corner entry conj(alpha).
/// In paraorthogonal mode the last coefficient is replaced by beta.
FiniteCMV build_cmv(const std::vector<cplx>& alpha,
                    Boundary boundary = Boundary::kTruncated,
                    cplx beta = cplx(1.0, 0.0));

/// Window [first, last] of the extended CMV matrix of a two-sided sequence.
/// alpha[k] holds the coefficient with index offset + k. Theta_j acts on
/// sites j, j+1. kWindow when the table does not cover [first-2, last+1].
struct CmvWindow {
  long first = 0;
  std::size_t size = 0;
  std::vector<cplx> dense;   // row-major size x size
};

CmvWindow build_extended_cmv_window(const std::vector<cplx>& alpha, long offset,
                                    long first, long last);

/// Monic OPUC recursion from Phi_0 = Phi*_0 = 1.
std::pair<cplx, cplx> szego_phi(const std::vector<cplx>& alpha, cplx z);

/// The n = alpha.size() + 1 zeros of z Phi_{n-1} - conj(beta) Phi*_{n-1}, as
/// sorted angles in [0, 2pi). kNumeric when the winding count does not reach
/// n.
std::vector<double> paraorthogonal_zeros(const std::vector<cplx>& alpha, cplx beta,
                                         double tol = 1e-10);

struct PeriodicVerblunsky {
  std::vector<cplx> alpha;

  std::size_t period() const { return alpha.size(); }
  void validate() const;
};

struct DiscriminantValue {
  double value = 0.0;
  double imag = 0.0;   // diagnostic, should vanish
};

/// D(theta) = e^{-i p theta/2} Tr prod rho_j^{-1} [[z, -conj(a_j)], [-a_j z, 1]]
/// on the double cover theta in [0, 4pi). kNumeric if the imaginary part is
/// not negligible.
DiscriminantValue cmv_discriminant(const PeriodicVerblunsky& P, double theta);

/// {theta : |D(theta)| <= 2} projected onto the circle.
CircleSpectralSet cmv_band_arcs(const PeriodicVerblunsky& P);

/// Eigenvalue angles (sorted, in [0, 2pi), with multiplicity) of a small
/// dense unitary matrix U (row-major k x k), located as the zeros of the real
/// function e^{-ik t/2} (det U)^{-1/2} i^{-k} det(e^{it} - U). kDomain when U is
/// not unitary to 1e-10, kNumeric when the zero count falls short of k.
std::vector<double> unitary_eigen_angles(const std::vector<cplx>& U, std::size_t k,
                                         double tol = 1e-12);

/// CSV "row,col,re,im" of the nonzero entries.
void write_triplets(std::ostream& out, const FiniteCMV& C);

}  // namespace esslab
