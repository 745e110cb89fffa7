#pragma once

// Lower bounds on distillable entanglement, evaluated on the environment
// that purifies rho_AB.

#include <string>
#include <utility>
#include <vector>

#include "qdecouple/qmat.hpp"

namespace qdecouple::distill {

/// Conditioning system used by every report in this module.
inline constexpr const char* kConditioning = "A|E";
extern const char* const kConditioningNote;

struct DistillParams {
  double eps = 0.0;
  double delta = 0.0;
  int nu = 0;  // |spec(rho_E)|
  std::string conditioning = kConditioning;
};

struct DistillReport {
  double oneshot_bits = 0.0;
  DistillParams params;
  int purification_rank = 0;
  std::vector<std::string> notes;
};

/// rho_AE obtained by purifying rho_AB onto a fresh factor and tracing out
/// everything except `a_labels` and that factor. The factor's label is
/// returned in `e_label`.
DensityOperator purification_marginal(const DensityOperator& rho_ab,
                                      const std::vector<std::string>& a_labels,
                                      std::string* e_label = nullptr);

/// H_h^{1-eps+3delta}(A|E) - log2(nu^2/delta^4). Throws BadDelta unless
/// 0 < delta < eps/3. Throws InvariantViolation if the nonzero spectra of
/// rho_E and rho_AB disagree beyond 1e-9.
DistillReport distill_lower_oneshot(const DensityOperator& rho_ab,
                                    const std::vector<std::string>& a_labels, double eps,
                                    double delta);

/// n H(A|E) + sqrt(n V(A|E)) phi_inv(eps).
double distill_second_order(const DensityOperator& rho_ab, const std::vector<std::string>& a_labels,
                            long n, double eps);

/// Largest gap between the sorted nonzero eigenvalues of rho_E and rho_AB.
double purification_spectrum_gap(const DensityOperator& rho_ab,
                                 const std::vector<std::string>& a_labels);

using Ensemble = std::vector<std::pair<double, Matrix>>;

/// |F(omega_XB, tau_XB) - sum_x sqrt(p(x) q(x)) F(omega_x, tau_x)| for the
/// block-diagonal classical-quantum states built from the two ensembles.
double cq_fidelity_decomposition_check(const Ensemble& first, const Ensemble& second);

}  // namespace qdecouple::distill
