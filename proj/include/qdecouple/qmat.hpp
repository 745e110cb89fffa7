#pragma once

// Dense complex Hermitian linear algebra and quantum-state primitives.

#include <complex>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qdecouple/error.hpp"
#include "qdecouple/rng.hpp"
#include "qdecouple/tolerances.hpp"

namespace qdecouple {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

struct Factor {
  std::string label;
  int dim = 1;

  bool operator==(const Factor&) const = default;
};

/// Ordered tensor factorization of a Hilbert space. Row-major convention:
/// the last factor's index varies fastest.
class SystemShape {
 public:
  SystemShape() = default;
  explicit SystemShape(std::vector<Factor> factors);

  static SystemShape single(std::string label, int dim);
  /// Parses "A=4,E=2".
  static SystemShape parse(std::string_view text);

  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  int total_dim() const;
  bool has(std::string_view label) const;
  std::size_t index_of(std::string_view label) const;
  int dim_of(std::string_view label) const;
  std::vector<std::string> labels() const;

  /// Factors of `*this` followed by those of `other`; labels must stay unique.
  SystemShape concat(const SystemShape& other) const;
  /// The listed factors, in the order they appear in `*this`.
  SystemShape subset(const std::vector<std::string>& keep) const;
  /// Replaces one factor by several with the same total dimension.
  SystemShape split_factor(std::string_view label, const std::vector<Factor>& parts) const;

  std::string to_string() const;

  bool operator==(const SystemShape&) const = default;

 private:
  std::vector<Factor> factors_;
};

/// A matrix together with the factorization of the space it acts on.
struct Operator {
  Matrix matrix;
  SystemShape shape;
};

struct SpectralDecomposition {
  RVector eigenvalues;  // descending
  Matrix eigenvectors;  // columns, orthonormal
};

class DensityOperator {
 public:
  /// Validates Hermiticity, positivity and unit trace; throws
  /// Error(InvariantViolation) otherwise.
  DensityOperator(Matrix matrix, SystemShape shape,
                  const Tolerances& tol = default_tolerances());
  DensityOperator(Matrix matrix, const Tolerances& tol = default_tolerances());

  const Matrix& matrix() const { return matrix_; }
  const SystemShape& shape() const { return shape_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  Operator as_operator() const { return {matrix_, shape_}; }

 private:
  Matrix matrix_;
  SystemShape shape_;
};

class PureState {
 public:
  PureState(CVector amplitudes, SystemShape shape,
            const Tolerances& tol = default_tolerances());

  const CVector& amplitudes() const { return amplitudes_; }
  const SystemShape& shape() const { return shape_; }
  DensityOperator density() const;

 private:
  CVector amplitudes_;
  SystemShape shape_;
};

class UnitaryOperator {
 public:
  explicit UnitaryOperator(Matrix matrix, const Tolerances& tol = default_tolerances());

  const Matrix& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

 private:
  Matrix matrix_;
};

// --- spectral tools -------------------------------------------------------

double hermiticity_residual(const Matrix& h);

/// Throws Error(NonHermitianInput) if max|H - H^dagger| exceeds
/// tol.hermiticity * max(1, max|H|).
SpectralDecomposition eig_hermitian(const Matrix& h, const Tolerances& tol = default_tolerances());

/// Same as eig_hermitian but symmetrizes instead of checking; for internal
/// callers that build the Hermitian matrix themselves.
SpectralDecomposition eig_symmetrized(const Matrix& h);

/// f applied to the eigenvalues of a Hermitian matrix.
Matrix hermitian_function(const Matrix& h, const std::function<double(double)>& f);

/// Projector onto the span of eigenvectors with eigenvalue > support_rel * lambda_max.
Matrix support_projector(const Matrix& psd, double support_rel = default_tolerances().support_rel);

/// psd^power on its support (zero on the kernel); negative powers allowed.
Matrix psd_power(const Matrix& psd, double power,
                 double support_rel = default_tolerances().support_rel);

// --- tensor structure -----------------------------------------------------

Matrix tensor(const Matrix& x, const Matrix& y);
Operator tensor(const Operator& x, const Operator& y);

Operator partial_trace(const Matrix& x, const SystemShape& shape,
                       const std::vector<std::string>& keep);
Operator partial_trace(const Operator& x, const std::vector<std::string>& keep);
DensityOperator partial_trace(const DensityOperator& rho, const std::vector<std::string>& keep);

/// Permutes tensor factors so they appear in `order` (a permutation of the labels).
Operator reorder(const Operator& x, const std::vector<std::string>& order);

/// 1 (x) op (x) 1 with `op` acting on factor `label`.
Matrix embed_on_subsystem(const Matrix& op, const SystemShape& shape, std::string_view label);

/// (U (x) 1) X (U (x) 1)^dagger with U acting on factor `label`.
Matrix conjugate_on_subsystem(const Matrix& x, const SystemShape& shape, std::string_view label,
                              const UnitaryOperator& u);

/// F = sum_ij |i><j| (x) |j><i| on C^d (x) C^d.
Matrix swap_operator(int d);

// --- norms and distances --------------------------------------------------

/// Schatten-1 norm of an arbitrary square matrix.
double trace_norm(const Matrix& x);
/// Schatten-1 norm for a Hermitian matrix (sum of |eigenvalues|).
double trace_norm_hermitian(const Matrix& h);

double trace_distance(const Matrix& rho, const Matrix& sigma);
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

double fidelity(const Matrix& rho, const Matrix& sigma);
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);

// --- sampling and constructions -------------------------------------------

/// d x d Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// phases of R's diagonal absorbed into Q.
UnitaryOperator sample_haar_unitary(int d, RngStream& stream);

/// Complex Ginibre matrix with i.i.d. standard complex normal entries.
Matrix ginibre(int rows, int cols, RngStream& stream);

/// Random Hermitian matrix (G + G^dagger) / 2.
Matrix random_hermitian(int d, RngStream& stream);

/// Induced-measure state G G^dagger / Tr[G G^dagger] with G of size d x rank.
DensityOperator random_density(int d, int rank, RngStream& stream, SystemShape shape = {});

/// Purification on shape (x) purifier; the purifying factor has dimension
/// rank(rho).
PureState purify(const DensityOperator& rho, std::string purifier_label = "R",
                 const Tolerances& tol = default_tolerances());

/// Maximally entangled pure state on m x m, as a density operator with shape A=m,B=m.
DensityOperator maximally_entangled(int m, std::string label_a = "A", std::string label_b = "B");

Matrix identity(int d);

}  // namespace qdecouple
