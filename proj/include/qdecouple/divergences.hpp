#pragma once

// Entropic quantities on finite-dimensional operators. Logarithms are base 2
// throughout, so every divergence and entropy is in bits.

#include <optional>
#include <string>
#include <vector>

#include "qdecouple/qmat.hpp"

namespace qdecouple::divergences {

/// Binary hypothesis test 0 <= T <= 1 with alpha = Tr[rho T], beta = Tr[sigma T].
struct TestOperator {
  Matrix matrix;
  double alpha = 0.0;
  double beta = 0.0;
};

enum class Status { Finite, PlusInfinity, MinusInfinity };

struct DivergenceValue {
  double value = 0.0;  // bits, +-infinity when status is not Finite
  Status status = Status::Finite;
  double epsilon = 0.0;
  std::optional<TestOperator> achiever;  // hypothesis-testing divergence
  std::optional<double> log_threshold;   // information-spectrum divergence
  double resolution = 0.0;               // bits; 0 when computed exactly
  bool commuting = false;
  bool degenerate_crossing = false;

  bool finite() const { return status == Status::Finite; }
};

struct SpectrumGroup {
  double representative = 0.0;
  std::vector<int> indices;  // into spectral.eigenvalues
};

struct SpectrumPartition {
  std::vector<SpectrumGroup> groups;
  double tolerance = 0.0;  // absolute gap used for grouping
  SpectralDecomposition spectral;

  int count() const { return static_cast<int>(groups.size()); }
  Matrix projector(std::size_t group) const;
};

/// Distinct eigenvalues of H: sorted eigenvalues are split wherever
/// consecutive gaps exceed rel_tol * max(1, ||H||_inf).
SpectrumPartition spec_count(const Matrix& h, double rel_tol = default_tolerances().spectrum_rel);

/// sum_i e_i X e_i over the spectral projectors e_i of H.
Matrix pinch(const Matrix& x, const Matrix& h, double rel_tol = default_tolerances().spectrum_rel);

/// D(rho||sigma); +infinity when supp(rho) is not inside supp(sigma).
double rel_entropy(const Matrix& rho, const Matrix& sigma);
/// V(rho||sigma) >= 0; +infinity under the same support violation.
double rel_entropy_variance(const Matrix& rho, const Matrix& sigma);

/// log2 sup{c : Tr[rho {rho <= c sigma}] <= eps}. Commuting pairs are solved
/// exactly by ratio sorting. Otherwise the threshold is located by a
/// top-down scan from the largest generalized eigenvalue followed by
/// bisection to `resolution` bits, which returns the largest feasible
/// threshold the scan can see even when the tail mass is not monotone.
DivergenceValue ds_eps(const Matrix& rho, const Matrix& sigma, double eps,
                       double resolution = 1e-6);

/// -log2 min{Tr[sigma T] : 0 <= T <= 1, Tr[rho T] >= 1 - eps}, with the
/// optimal test attached.
DivergenceValue dh_eps(const Matrix& rho, const Matrix& sigma, double eps);

/// log2 Tr[(sigma^{-1/4} rho sigma^{-1/4})^2]; +infinity on support violation.
double collision_div(const Matrix& rho, const Matrix& sigma);

/// 1_A (x) rho_B laid out in the factor order of rho_AB.
Matrix conditioning_operator(const DensityOperator& rho_ab, const std::vector<std::string>& a_labels);

/// H_h^eps(A|B) = -D_h^eps(rho_AB || 1_A (x) rho_B).
double cond_hh(const DensityOperator& rho_ab, const std::vector<std::string>& a_labels, double eps);
DivergenceValue cond_dh(const DensityOperator& rho_ab, const std::vector<std::string>& a_labels,
                        double eps);

/// H(A|B) = -D(rho_AB || 1_A (x) rho_B).
double cond_entropy(const DensityOperator& rho_ab, const std::vector<std::string>& a_labels);
/// V(A|B) = V(rho_AB || 1_A (x) rho_B).
double cond_variance(const DensityOperator& rho_ab, const std::vector<std::string>& a_labels);

/// Common eigenbasis of a commuting pair with the diagonal weights of each
/// operator; nullopt when [rho, sigma] is not numerically zero.
struct JointSpectrum {
  RVector p;
  RVector q;
  Matrix basis;
};
std::optional<JointSpectrum> joint_diagonalize(const Matrix& rho, const Matrix& sigma);

}  // namespace qdecouple::divergences
