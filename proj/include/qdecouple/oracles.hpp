#pragma once

// Brute-force reference computations. These are deliberately slow and share
// nothing with the divergences module except the linear-algebra layer.

#include <vector>

#include "qdecouple/qmat.hpp"

namespace qdecouple::oracles {

/// Commuting specialization of a (rho, sigma) pair: p is a probability
/// vector, q is non-negative and may be sub-normalized.
struct ClassicalPair {
  std::vector<double> p;
  std::vector<double> q;

  ClassicalPair(std::vector<double> p, std::vector<double> q);
};

struct NeymanPearson {
  double value = 0.0;         // bits; +infinity if the accepted q-mass is zero
  std::vector<double> test;   // acceptance weight per outcome, in [0, 1]
};

/// Classical Neyman-Pearson: accept outcomes by decreasing p/q until the
/// p-mass reaches 1 - eps, splitting the boundary outcome.
NeymanPearson classical_np(const ClassicalPair& pair, double eps);

struct IidResult {
  double value = 0.0;
  double dropped_mass = 0.0;  // p-mass of types below 1e-300 that were skipped
  std::size_t types = 0;
};

/// Exact D_h^eps(p^{(x)n} || q^{(x)n}) by enumerating type classes.
/// Alphabet size <= 4 and n <= 512; Error(TooLarge) past 10^6 types.
IidResult iid_classical_dh(const ClassicalPair& pair, int n, double eps);

/// Grid search over qubit tests T = t1|v1><v1| + t2|v2><v2|: the basis
/// (v1, v2) runs over a Bloch-sphere grid with `steps` divisions per angle
/// and the weights are solved exactly within each basis. Angles are measured
/// from the Bloch vector of rho. Each zoom level re-grids a window around the
/// incumbent and shrinks it by 4. Every candidate is a feasible test, so the
/// result never exceeds the true optimum.
double grid_dh_dim2(const Matrix& rho, const Matrix& sigma, double eps, int steps,
                    int zoom_levels = 20);

/// Standard normal CDF: Taylor series for |x| < 3, continued fraction for
/// the tails.
double normal_cdf(double x);

/// Inverse normal CDF by bisection on normal_cdf. Domain [1e-12, 1 - 1e-12].
double phi_inv_bisect(double eps);

}  // namespace qdecouple::oracles
