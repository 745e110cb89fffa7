#pragma once

namespace qdecouple {

/// Numerical tolerances shared by every module. Defaults are the values the
/// validity checks are specified against; callers may pass a modified copy.
struct Tolerances {
  double hermiticity = 1e-10;     // max |M - M^dagger| entry
  double unitarity = 1e-10;       // max |U^dagger U - I| entry
  double trace = 1e-10;           // |Tr rho - 1|
  double psd = 1e-10;             // smallest admissible eigenvalue is -psd
  double norm = 1e-10;            // | <psi|psi> - 1 |
  double reconstruction = 1e-9;   // relative Frobenius error of V diag V^dagger
  double support_rel = 1e-12;     // eigenvalues above support_rel * lambda_max span the support
  double spectrum_rel = 1e-9;     // gap rule for grouping distinct eigenvalues
  double test_operator = 1e-9;    // 0 <= T <= 1 slack for hypothesis tests
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

}  // namespace qdecouple
