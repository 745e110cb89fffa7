#pragma once

// Haar-randomized decoupling: a Haar unitary on A = A1 (x) C followed by
// the partial trace over A1, compared against 1_C/|C| (x) rho_E in trace
// distance.

#include <cstdint>
#include <vector>

#include "qdecouple/qmat.hpp"

namespace qdecouple::decoupling {

/// A = A1 (x) C, with A1 traced out. The environment E is kept.
struct DecouplingSplit {
  int dim_a1 = 1;
  int dim_c = 1;
  int dim_e = 1;

  /// Validates dim_c | dim_a.
  static DecouplingSplit from_remainder(int dim_a, int dim_c, int dim_e);

  int dim_a() const { return dim_a1 * dim_c; }
  SystemShape shape() const;  // A1, C, E
};

struct DeltaEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  DecouplingSplit split;
};

/// Tr_{A1}[(U (x) 1_E) rho (U (x) 1_E)^dagger] as a state on C (x) E.
DensityOperator apply_decoupling(const DensityOperator& rho_ae, const DecouplingSplit& split,
                                 const UnitaryOperator& u);

/// 1/2 || apply_decoupling(...) - 1_C/|C| (x) rho_E ||_1 for one unitary.
double decoupling_error(const DensityOperator& rho_ae, const DecouplingSplit& split,
                        const UnitaryOperator& u);

/// Monte Carlo estimate of the average decoupling error. Sample i draws its
/// unitary from RngStream(seed, i), and the reduction order is fixed, so the
/// result is bitwise independent of `threads`.
DeltaEstimate delta_estimate(const DensityOperator& rho_ae, const DecouplingSplit& split,
                             std::size_t samples, std::uint64_t seed, unsigned threads = 1);

struct EllEstimate {
  int ell_conservative = 1;  // largest |C| with mean + k*stderr <= eps
  int ell_optimistic = 1;    // largest |C| with mean - k*stderr <= eps
  std::vector<DeltaEstimate> table;  // one row per divisor of |A|, ascending
};

/// Scans every divisor |C| of |A| (no monotonicity in |C| is assumed).
EllEstimate empirical_ell(const DensityOperator& rho_ae, int dim_a, int dim_e, double eps,
                          std::size_t samples, std::uint64_t seed, double confidence_k = 2.0,
                          unsigned threads = 1);

std::vector<int> divisors(int n);

/// Exact Haar average E_U U^dagger (1_{A1} (x) Tr_{A1}[U sigma U^dagger]) U
/// = alpha 1_A (x) sigma_E + beta sigma_AE, with C playing the role of A2.
Matrix haar_average_exact(const Matrix& sigma_ae, const DecouplingSplit& split);
double haar_alpha(const DecouplingSplit& split);
double haar_beta(const DecouplingSplit& split);

/// Monte Carlo counterpart of haar_average_exact.
Matrix haar_average_mc(const Matrix& sigma_ae, const DecouplingSplit& split, std::size_t samples,
                       std::uint64_t seed, unsigned threads = 1);

struct RandomizingStatistic {
  double mean = 0.0;       // E || T(U X U^dagger) - 1_C/|C| (x) Tr_A X ||_2
  double std_error = 0.0;
  double bound = 0.0;      // |A1|^{-1/2} ||X||_2
};

/// Empirical check of the |A1|^{-1/2}-randomizing property for an arbitrary
/// operator X on A (x) E.
RandomizingStatistic randomizing_statistic(const Matrix& x_ae, const DecouplingSplit& split,
                                           std::size_t samples, std::uint64_t seed);

}  // namespace qdecouple::decoupling
