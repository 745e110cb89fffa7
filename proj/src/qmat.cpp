#include "qdecouple/qmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace qdecouple {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonHermitianInput: return "NonHermitianInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::BadShape: return "BadShape";
    case ErrorKind::BadRank: return "BadRank";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::BadDelta: return "BadDelta";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::NoValidParams: return "NoValidParams";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// SystemShape

SystemShape::SystemShape(std::vector<Factor> factors) : factors_(std::move(factors)) {
  std::set<std::string> seen;
  for (const auto& f : factors_) {
    if (f.dim < 1) throw Error(ErrorKind::BadShape, "factor '" + f.label + "' has dim < 1");
    if (f.label.empty()) throw Error(ErrorKind::BadShape, "empty factor label");
    if (!seen.insert(f.label).second)
      throw Error(ErrorKind::BadShape, "duplicate label '" + f.label + "'");
  }
}

SystemShape SystemShape::single(std::string label, int dim) {
  return SystemShape({Factor{std::move(label), dim}});
}

SystemShape SystemShape::parse(std::string_view text) {
  std::vector<Factor> factors;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string_view item = text.substr(pos, comma - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 >= item.size())
      throw Error(ErrorKind::Parse, "bad split item '" + std::string(item) + "', expected LABEL=DIM");
    Factor f;
    f.label = std::string(item.substr(0, eq));
    const std::string dim_text(item.substr(eq + 1));
    std::size_t used = 0;
    try {
      f.dim = std::stoi(dim_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != dim_text.size())
      throw Error(ErrorKind::Parse, "bad dimension '" + dim_text + "'");
    factors.push_back(std::move(f));
    pos = comma + 1;
  }
  return SystemShape(std::move(factors));
}

int SystemShape::total_dim() const {
  int d = 1;
  for (const auto& f : factors_) d *= f.dim;
  return d;
}

bool SystemShape::has(std::string_view label) const {
  return std::any_of(factors_.begin(), factors_.end(),
                     [&](const Factor& f) { return f.label == label; });
}

std::size_t SystemShape::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].label == label) return i;
  throw Error(ErrorKind::UnknownLabel, "no factor labelled '" + std::string(label) + "' in " +
                                           to_string());
}

int SystemShape::dim_of(std::string_view label) const { return factors_[index_of(label)].dim; }

std::vector<std::string> SystemShape::labels() const {
  std::vector<std::string> out;
  for (const auto& f : factors_) out.push_back(f.label);
  return out;
}

SystemShape SystemShape::concat(const SystemShape& other) const {
  std::vector<Factor> all = factors_;
  all.insert(all.end(), other.factors_.begin(), other.factors_.end());
  return SystemShape(std::move(all));
}

SystemShape SystemShape::subset(const std::vector<std::string>& keep) const {
  for (const auto& label : keep) (void)index_of(label);
  std::vector<Factor> out;
  for (const auto& f : factors_)
    if (std::find(keep.begin(), keep.end(), f.label) != keep.end()) out.push_back(f);
  return SystemShape(std::move(out));
}

SystemShape SystemShape::split_factor(std::string_view label,
                                      const std::vector<Factor>& parts) const {
  const std::size_t at = index_of(label);
  int product = 1;
  for (const auto& p : parts) product *= p.dim;
  if (product != factors_[at].dim)
    throw Error(ErrorKind::DimensionMismatch,
                "split of '" + std::string(label) + "' does not preserve its dimension");
  std::vector<Factor> out(factors_.begin(), factors_.begin() + static_cast<long>(at));
  out.insert(out.end(), parts.begin(), parts.end());
  out.insert(out.end(), factors_.begin() + static_cast<long>(at) + 1, factors_.end());
  return SystemShape(std::move(out));
}

std::string SystemShape::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) os << ',';
    os << factors_[i].label << '=' << factors_[i].dim;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// validated value types

namespace {

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

SystemShape default_shape(const SystemShape& shape, Eigen::Index d) {
  if (shape.size() == 0) return SystemShape::single("S", static_cast<int>(d));
  return shape;
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols())
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " is not square");
}

}  // namespace

DensityOperator::DensityOperator(Matrix matrix, SystemShape shape, const Tolerances& tol)
    : matrix_(std::move(matrix)), shape_(default_shape(shape, matrix_.rows())) {
  require_square(matrix_, "density matrix");
  if (shape_.total_dim() != matrix_.rows())
    throw Error(ErrorKind::DimensionMismatch, "shape " + shape_.to_string() +
                                                  " does not match matrix dimension " +
                                                  std::to_string(matrix_.rows()));
  if (hermiticity_residual(matrix_) > tol.hermiticity)
    throw Error(ErrorKind::InvariantViolation, "density matrix is not Hermitian");
  matrix_ = (0.5 * (matrix_ + matrix_.adjoint())).eval();
  const double tr = matrix_.trace().real();
  if (std::abs(tr - 1.0) > tol.trace)
    throw Error(ErrorKind::InvariantViolation, "density matrix trace is " + std::to_string(tr));
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol.psd)
    throw Error(ErrorKind::InvariantViolation, "density matrix has a negative eigenvalue " +
                                                   std::to_string(es.eigenvalues().minCoeff()));
}

DensityOperator::DensityOperator(Matrix matrix, const Tolerances& tol)
    : DensityOperator(std::move(matrix), SystemShape{}, tol) {}

PureState::PureState(CVector amplitudes, SystemShape shape, const Tolerances& tol)
    : amplitudes_(std::move(amplitudes)), shape_(default_shape(shape, amplitudes_.size())) {
  if (shape_.total_dim() != amplitudes_.size())
    throw Error(ErrorKind::DimensionMismatch, "pure state shape does not match its length");
  if (std::abs(amplitudes_.squaredNorm() - 1.0) > tol.norm)
    throw Error(ErrorKind::InvariantViolation, "pure state is not normalized");
}

DensityOperator PureState::density() const {
  return DensityOperator(amplitudes_ * amplitudes_.adjoint(), shape_);
}

UnitaryOperator::UnitaryOperator(Matrix matrix, const Tolerances& tol)
    : matrix_(std::move(matrix)) {
  require_square(matrix_, "unitary");
  const Matrix residual = matrix_.adjoint() * matrix_ - identity(dim());
  if (max_abs(residual) > tol.unitarity)
    throw Error(ErrorKind::InvariantViolation, "matrix is not unitary");
}

// ---------------------------------------------------------------------------
// spectral tools

double hermiticity_residual(const Matrix& h) {
  require_square(h, "matrix");
  return max_abs(h - h.adjoint());
}

SpectralDecomposition eig_symmetrized(const Matrix& h) {
  require_square(h, "matrix");
  const Matrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Eigen::Index d = sym.rows();
  SpectralDecomposition out;
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = es.eigenvectors().rowwise().reverse();
  (void)d;
  return out;
}

SpectralDecomposition eig_hermitian(const Matrix& h, const Tolerances& tol) {
  if (hermiticity_residual(h) > tol.hermiticity * std::max(1.0, max_abs(h)))
    throw Error(ErrorKind::NonHermitianInput, "eig_hermitian: input is not Hermitian");
  return eig_symmetrized(h);
}

Matrix hermitian_function(const Matrix& h, const std::function<double(double)>& f) {
  const auto sd = eig_symmetrized(h);
  RVector fl(sd.eigenvalues.size());
  for (Eigen::Index i = 0; i < fl.size(); ++i) fl(i) = f(sd.eigenvalues(i));
  return sd.eigenvectors * fl.cast<Complex>().asDiagonal() * sd.eigenvectors.adjoint();
}

Matrix support_projector(const Matrix& psd, double support_rel) {
  const auto sd = eig_symmetrized(psd);
  const double lmax = sd.eigenvalues.size() ? sd.eigenvalues(0) : 0.0;
  const double cut = support_rel * std::max(lmax, 0.0);
  Matrix p = Matrix::Zero(psd.rows(), psd.cols());
  for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i)
    if (sd.eigenvalues(i) > cut && sd.eigenvalues(i) > 0.0)
      p += sd.eigenvectors.col(i) * sd.eigenvectors.col(i).adjoint();
  return p;
}

Matrix psd_power(const Matrix& psd, double power, double support_rel) {
  const auto sd = eig_symmetrized(psd);
  const double lmax = sd.eigenvalues.size() ? sd.eigenvalues(0) : 0.0;
  const double cut = support_rel * std::max(lmax, 0.0);
  RVector fl = RVector::Zero(sd.eigenvalues.size());
  for (Eigen::Index i = 0; i < fl.size(); ++i)
    if (sd.eigenvalues(i) > cut && sd.eigenvalues(i) > 0.0)
      fl(i) = std::pow(sd.eigenvalues(i), power);
  return sd.eigenvectors * fl.cast<Complex>().asDiagonal() * sd.eigenvectors.adjoint();
}

// ---------------------------------------------------------------------------
// tensor structure

namespace {

/// Linear indices (into the full space) of all configurations of the
/// factors `which`, enumerated row-major in the order given, with every
/// other factor held at index 0.
std::vector<Eigen::Index> factor_offsets(const SystemShape& shape,
                                         const std::vector<std::size_t>& which) {
  const auto& f = shape.factors();
  std::vector<Eigen::Index> stride(f.size(), 1);
  for (std::size_t j = f.size(); j-- > 1;) stride[j - 1] = stride[j] * f[j].dim;

  std::vector<Eigen::Index> offsets{0};
  for (const std::size_t j : which) {
    std::vector<Eigen::Index> next;
    next.reserve(offsets.size() * static_cast<std::size_t>(f[j].dim));
    for (const auto base : offsets)
      for (int i = 0; i < f[j].dim; ++i) next.push_back(base + i * stride[j]);
    offsets = std::move(next);
  }
  return offsets;
}

void require_shape(const Matrix& x, const SystemShape& shape) {
  require_square(x, "operator");
  if (shape.total_dim() != x.rows())
    throw Error(ErrorKind::DimensionMismatch,
                "shape " + shape.to_string() + " does not match dimension " +
                    std::to_string(x.rows()));
}

}  // namespace

Matrix identity(int d) { return Matrix::Identity(d, d); }

Matrix tensor(const Matrix& x, const Matrix& y) {
  Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

Operator tensor(const Operator& x, const Operator& y) {
  return {tensor(x.matrix, y.matrix), x.shape.concat(y.shape)};
}

Operator partial_trace(const Matrix& x, const SystemShape& shape,
                       const std::vector<std::string>& keep) {
  require_shape(x, shape);
  std::vector<std::size_t> kept, traced;
  for (const auto& label : keep) (void)shape.index_of(label);
  for (std::size_t j = 0; j < shape.size(); ++j) {
    const auto& label = shape.factors()[j].label;
    if (std::find(keep.begin(), keep.end(), label) != keep.end())
      kept.push_back(j);
    else
      traced.push_back(j);
  }
  const auto ok = factor_offsets(shape, kept);
  const auto ot = factor_offsets(shape, traced);
  const auto n = static_cast<Eigen::Index>(ok.size());
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) {
      Complex acc = 0.0;
      for (const auto t : ot) acc += x(ok[r] + t, ok[c] + t);
      out(r, c) = acc;
    }
  return {std::move(out), shape.subset(keep)};
}

Operator partial_trace(const Operator& x, const std::vector<std::string>& keep) {
  return partial_trace(x.matrix, x.shape, keep);
}

DensityOperator partial_trace(const DensityOperator& rho, const std::vector<std::string>& keep) {
  auto reduced = partial_trace(rho.matrix(), rho.shape(), keep);
  return DensityOperator(std::move(reduced.matrix), std::move(reduced.shape));
}

Operator reorder(const Operator& x, const std::vector<std::string>& order) {
  require_shape(x.matrix, x.shape);
  if (order.size() != x.shape.size())
    throw Error(ErrorKind::BadShape, "reorder needs a permutation of all labels");
  std::vector<std::size_t> perm;
  std::vector<Factor> factors;
  for (const auto& label : order) {
    perm.push_back(x.shape.index_of(label));
    factors.push_back(x.shape.factors()[perm.back()]);
  }
  SystemShape shape(std::move(factors));
  const auto off = factor_offsets(x.shape, perm);
  const auto n = static_cast<Eigen::Index>(off.size());
  Matrix out(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) out(r, c) = x.matrix(off[r], off[c]);
  return {std::move(out), std::move(shape)};
}

Matrix embed_on_subsystem(const Matrix& op, const SystemShape& shape, std::string_view label) {
  const std::size_t at = shape.index_of(label);
  if (op.rows() != shape.factors()[at].dim || op.cols() != op.rows())
    throw Error(ErrorKind::DimensionMismatch,
                "operator dimension does not match factor '" + std::string(label) + "'");
  int left = 1, right = 1;
  for (std::size_t j = 0; j < shape.size(); ++j) {
    if (j < at) left *= shape.factors()[j].dim;
    if (j > at) right *= shape.factors()[j].dim;
  }
  return tensor(tensor(identity(left), op), identity(right));
}

Matrix conjugate_on_subsystem(const Matrix& x, const SystemShape& shape, std::string_view label,
                              const UnitaryOperator& u) {
  require_shape(x, shape);
  const Matrix w = embed_on_subsystem(u.matrix(), shape, label);
  return w * x * w.adjoint();
}

Matrix swap_operator(int d) {
  Matrix f = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) f(i * d + j, j * d + i) = 1.0;
  return f;
}

// ---------------------------------------------------------------------------
// norms and distances

double trace_norm(const Matrix& x) {
  Eigen::JacobiSVD<Matrix> svd(x);
  return svd.singularValues().sum();
}

double trace_norm_hermitian(const Matrix& h) {
  return eig_symmetrized(h).eigenvalues.cwiseAbs().sum();
}

double trace_distance(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw Error(ErrorKind::DimensionMismatch, "trace_distance: dimensions differ");
  return 0.5 * trace_norm_hermitian(rho - sigma);
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  return trace_distance(rho.matrix(), sigma.matrix());
}

double fidelity(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw Error(ErrorKind::DimensionMismatch, "fidelity: dimensions differ");
  return trace_norm(psd_power(rho, 0.5) * psd_power(sigma, 0.5));
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  return fidelity(rho.matrix(), sigma.matrix());
}

// ---------------------------------------------------------------------------
// sampling and constructions

Matrix ginibre(int rows, int cols, RngStream& stream) {
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = stream.complex_normal();
  return g;
}

Matrix random_hermitian(int d, RngStream& stream) {
  const Matrix g = ginibre(d, d, stream);
  return 0.5 * (g + g.adjoint());
}

UnitaryOperator sample_haar_unitary(int d, RngStream& stream) {
  if (d < 1) throw Error(ErrorKind::InvalidParams, "unitary dimension must be >= 1");
  const Matrix z = ginibre(d, d, stream);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (int j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    const Complex phase = mag > 0.0 ? rjj / mag : Complex(1.0);
    q.col(j) *= phase;
  }
  return UnitaryOperator(std::move(q));
}

DensityOperator random_density(int d, int rank, RngStream& stream, SystemShape shape) {
  if (rank < 1 || rank > d)
    throw Error(ErrorKind::BadRank, "rank " + std::to_string(rank) + " not in [1, " +
                                        std::to_string(d) + "]");
  const Matrix g = ginibre(d, rank, stream);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator(std::move(rho), std::move(shape));
}

PureState purify(const DensityOperator& rho, std::string purifier_label, const Tolerances& tol) {
  const auto sd = eig_symmetrized(rho.matrix());
  const double cut = tol.support_rel * std::max(sd.eigenvalues(0), 0.0);
  int rank = 0;
  while (rank < sd.eigenvalues.size() && sd.eigenvalues(rank) > cut) ++rank;
  rank = std::max(rank, 1);

  const int d = rho.dim();
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(d) * rank);
  for (int k = 0; k < rank; ++k) {
    const double w = std::sqrt(std::max(sd.eigenvalues(k), 0.0));
    for (int i = 0; i < d; ++i) psi(static_cast<Eigen::Index>(i) * rank + k) = w * sd.eigenvectors(i, k);
  }
  psi.normalize();
  return PureState(std::move(psi),
                   rho.shape().concat(SystemShape::single(std::move(purifier_label), rank)), tol);
}

DensityOperator maximally_entangled(int m, std::string label_a, std::string label_b) {
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(m) * m);
  for (int i = 0; i < m; ++i) psi(static_cast<Eigen::Index>(i) * m + i) = 1.0 / std::sqrt(double(m));
  return DensityOperator(psi * psi.adjoint(),
                         SystemShape({{std::move(label_a), m}, {std::move(label_b), m}}));
}

}  // namespace qdecouple
