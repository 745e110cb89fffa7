#pragma once

// Achievability and converse bounds on the maximal remainder dimension, the
// deterministic certificate behind the achievability side, and the
// second-order and moderate-deviation rate formulas.

#include <string>
#include <vector>

#include "qdecouple/decoupling.hpp"
#include "qdecouple/qmat.hpp"

namespace qdecouple::bounds {

struct BoundParams {
  double eps = 0.0;
  double delta_lower = 0.0;
  double delta_upper = 0.0;
  double c = 0.0;
  int nu = 0;  // |spec(rho_E)|
  double spec_tolerance = 0.0;
  double log2_a = 0.0;
};

struct GridPoint {
  double delta = 0.0;
  double c = 0.0;
  double lower_bits = 0.0;
  double upper_bits = 0.0;
  bool valid_lower = false;
  bool valid_upper = false;
};

struct BoundReport {
  double lower_bits = 0.0;
  double upper_bits = 0.0;
  BoundParams params;
  bool valid_lower = false;
  bool valid_upper = false;
  std::vector<std::string> notes;
  std::vector<GridPoint> grid;
};

/// Always attached to reports that evaluate the upper bound.
extern const char* const kConverseRangeNote;

/// log2 |A| for the listed factors.
double log2_dim(const DensityOperator& rho_ae, const std::vector<std::string>& a_labels);
/// nu = number of distinct eigenvalues of rho_E.
int spectrum_size_e(const DensityOperator& rho_ae, const std::vector<std::string>& a_labels);

/// 1/2 (log2|A| + H_h^{1-eps+3delta}(A|E)) - log2(nu/delta^2). Throws
/// BadDelta unless 0 < delta < eps/3.
double theorem1_lower(const DensityOperator& rho_ae, const std::vector<std::string>& a_labels,
                      double eps, double delta);

/// 1/2 (log2|A| + H_h^{1-eps-2delta}(A|E) + log2[(1+c)(eps+1/c) / (delta(delta-1/c))]).
/// Requires 0 < delta < min(eps/3, (1-eps)/2) and c*delta > 1; throws
/// InvalidParams otherwise.
double theorem1_upper(const DensityOperator& rho_ae, const std::vector<std::string>& a_labels,
                      double eps, double delta, double c);

/// Penalty term log2[(1+c)(eps+1/c) / (delta(delta-1/c))] of the upper bound.
double upper_penalty(double eps, double delta, double c);

/// The two bounds as functions of the entropy value hh = H_h(A|E) at the
/// matching smoothing parameter. No range checks beyond the log argument.
double lower_from_entropy(double log2_a, double hh, int nu, double delta);
double upper_from_entropy(double log2_a, double hh, double eps, double delta, double c);

/// Tr[rho {P[rho] > c 1 (x) rho_E}] + sqrt(|C|/|A|) sqrt(c nu |C|), with P
/// the pinching by 1 (x) rho_E. Deterministic upper bound on the average
/// decoupling error. A threshold sitting on an eigenvalue ratio is moved up
/// by a relative 1e-9.
double pmain_certificate(const DensityOperator& rho_ae, const decoupling::DecouplingSplit& split,
                         double c);

struct Theorem1Grid {
  std::vector<double> delta_lower;
  std::vector<double> delta_upper;
  std::vector<double> c;  // empty: per-delta default grid

  /// 20 log-spaced deltas in [1e-3, validity max) for each side.
  static Theorem1Grid defaults(double eps);
};

std::vector<double> default_c_grid(double delta);
std::vector<double> log_space(double lo, double hi, int count, bool include_hi);

/// Lower bound maximized over the delta grid, upper bound minimized over the
/// (delta, c) grid. Ties go to the smallest delta, then the smallest c.
/// Throws NoValidParams when neither side has a valid grid point.
BoundReport optimize_theorem1(const DensityOperator& rho_ae,
                              const std::vector<std::string>& a_labels, double eps,
                              const Theorem1Grid& grid);
BoundReport optimize_theorem1(const DensityOperator& rho_ae,
                              const std::vector<std::string>& a_labels, double eps);

/// Inverse standard normal CDF on [1e-12, 1 - 1e-12].
double phi_inv(double eps);

/// n/2 (log2|A| + H(A|E)) + 1/2 sqrt(n V(A|E)) phi_inv(eps), without the
/// O(log n) remainder.
double second_order_rate(const DensityOperator& rho_ae, const std::vector<std::string>& a_labels,
                         long n, double eps);

enum class ErrorSide { Small, Large };

/// Per-copy rate 1/2 (log2|A| + H(A|E)) -+ sqrt(V(A|E)/2) a_n; minus on the
/// small-error side.
double moderate_rate(const DensityOperator& rho_ae, const std::vector<std::string>& a_labels,
                     double a_n, ErrorSide side);

/// a_n = scale * n^(-power), checked on [n_min, n_max].
struct ModerateSequence {
  double scale = 1.0;
  double power = 0.25;
};

struct ModerateCheck {
  bool admissible = false;  // a_n -> 0 and n a_n^2 -> infinity
  std::vector<std::string> warnings;
};

ModerateCheck check_moderate_sequence(const ModerateSequence& seq, long n_min, long n_max);

}  // namespace qdecouple::bounds
