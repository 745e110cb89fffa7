#include "qdecouple/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qdecouple::divergences {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_dim(const Matrix& rho, const Matrix& sigma, const char* op) {
  if (rho.rows() != rho.cols() || sigma.rows() != sigma.cols() || rho.rows() != sigma.rows())
    throw Error(ErrorKind::DimensionMismatch, std::string(op) + ": operand dimensions differ");
}

void require_eps(double eps, const char* op) {
  if (!(eps > 0.0 && eps < 1.0))
    throw Error(ErrorKind::OutOfRange, std::string(op) + ": epsilon must lie in (0, 1)");
}

double spectral_norm(const Matrix& h) {
  const auto sd = eig_symmetrized(h);
  return sd.eigenvalues.size() ? sd.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
}

double expect(const Matrix& op, const CVector& v) { return v.dot(op * v).real(); }

/// Mass of rho outside the support of sigma.
double mass_outside_support(const Matrix& rho, const Matrix& sigma) {
  const Matrix p = support_projector(sigma);
  return (rho * (identity(static_cast<int>(rho.rows())) - p)).trace().real();
}

/// Base-2 log restricted to the support; zero on the kernel.
Matrix log2_on_support(const Matrix& psd) {
  const auto sd = eig_symmetrized(psd);
  const double lmax = sd.eigenvalues.size() ? sd.eigenvalues(0) : 0.0;
  const double cut = default_tolerances().support_rel * std::max(lmax, 0.0);
  RVector fl = RVector::Zero(sd.eigenvalues.size());
  for (Eigen::Index i = 0; i < fl.size(); ++i)
    if (sd.eigenvalues(i) > cut && sd.eigenvalues(i) > 0.0) fl(i) = std::log2(sd.eigenvalues(i));
  return sd.eigenvectors * fl.cast<Complex>().asDiagonal() * sd.eigenvectors.adjoint();
}

bool support_contained(const Matrix& rho, const Matrix& sigma) {
  return mass_outside_support(rho, sigma) <= 1e-12 * std::max(1.0, rho.trace().real());
}

/// Exact information-spectrum threshold for commuting (diagonal) weights.
DivergenceValue classical_ds(const RVector& p, const RVector& q, double eps) {
  DivergenceValue out;
  out.epsilon = eps;
  out.commuting = true;
  const double pmax = p.maxCoeff();
  const double qmax = std::max(q.maxCoeff(), 0.0);
  struct Item {
    double ratio;
    double mass;
  };
  std::vector<Item> items;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p(i) > 1e-14 * pmax)) continue;
    const bool q_zero = !(q(i) > default_tolerances().support_rel * qmax);
    items.push_back({q_zero ? kInf : p(i) / q(i), p(i)});
  }
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.ratio < b.ratio; });
  double cum = 0.0;
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i;
    const double r = items[i].ratio;
    while (j < items.size() &&
           (items[j].ratio == r || std::abs(items[j].ratio - r) <= 1e-12 * std::abs(r)))
      cum += items[j++].mass;
    if (cum > eps) {
      if (std::isinf(r)) break;
      out.value = std::log2(r);
      out.log_threshold = out.value;
      return out;
    }
    i = j;
  }
  out.status = Status::PlusInfinity;
  out.value = kInf;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Matrix SpectrumPartition::projector(std::size_t group) const {
  const auto& g = groups.at(group);
  const Eigen::Index d = spectral.eigenvectors.rows();
  Matrix p = Matrix::Zero(d, d);
  for (const int i : g.indices) p += spectral.eigenvectors.col(i) * spectral.eigenvectors.col(i).adjoint();
  return p;
}

SpectrumPartition spec_count(const Matrix& h, double rel_tol) {
  if (rel_tol < 0.0) throw Error(ErrorKind::InvalidParams, "spec_count: negative tolerance");
  SpectrumPartition out;
  out.spectral = eig_hermitian(h);
  const auto& ev = out.spectral.eigenvalues;
  const double scale = std::max(1.0, ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0);
  out.tolerance = rel_tol * scale;
  for (int i = 0; i < ev.size(); ++i) {
    if (out.groups.empty() || ev(i - 1) - ev(i) > out.tolerance) out.groups.emplace_back();
    out.groups.back().indices.push_back(i);
  }
  for (auto& g : out.groups) {
    double sum = 0.0;
    for (const int i : g.indices) sum += ev(i);
    g.representative = sum / static_cast<double>(g.indices.size());
  }
  return out;
}

Matrix pinch(const Matrix& x, const Matrix& h, double rel_tol) {
  if (x.rows() != h.rows() || x.cols() != h.cols())
    throw Error(ErrorKind::DimensionMismatch, "pinch: operand dimensions differ");
  const auto part = spec_count(h, rel_tol);
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (std::size_t g = 0; g < part.groups.size(); ++g) {
    const Matrix p = part.projector(g);
    out += p * x * p;
  }
  return out;
}

std::optional<JointSpectrum> joint_diagonalize(const Matrix& rho, const Matrix& sigma) {
  require_same_dim(rho, sigma, "joint_diagonalize");
  const double scale = std::max(1e-300, spectral_norm(rho) * spectral_norm(sigma));
  const Matrix comm = rho * sigma - sigma * rho;
  if (comm.cwiseAbs().maxCoeff() > 1e-11 * scale) return std::nullopt;

  const auto part = spec_count(sigma);
  const Eigen::Index d = rho.rows();
  JointSpectrum out;
  out.basis = Matrix::Zero(d, d);
  out.p.resize(d);
  out.q.resize(d);
  Eigen::Index col = 0;
  for (const auto& g : part.groups) {
    const auto k = static_cast<Eigen::Index>(g.indices.size());
    Matrix vg(d, k);
    for (Eigen::Index j = 0; j < k; ++j) vg.col(j) = part.spectral.eigenvectors.col(g.indices[j]);
    const Matrix block = vg.adjoint() * rho * vg;
    const auto inner = eig_symmetrized(block);
    out.basis.middleCols(col, k) = vg * inner.eigenvectors;
    col += k;
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    out.p(i) = expect(rho, out.basis.col(i));
    out.q(i) = expect(sigma, out.basis.col(i));
  }
  return out;
}

// ---------------------------------------------------------------------------

double rel_entropy(const Matrix& rho, const Matrix& sigma) {
  require_same_dim(rho, sigma, "rel_entropy");
  if (!support_contained(rho, sigma)) return kInf;
  const Matrix diff = log2_on_support(rho) - log2_on_support(sigma);
  return (rho * diff).trace().real();
}

double rel_entropy_variance(const Matrix& rho, const Matrix& sigma) {
  require_same_dim(rho, sigma, "rel_entropy_variance");
  if (!support_contained(rho, sigma)) return kInf;
  const Matrix diff = log2_on_support(rho) - log2_on_support(sigma);
  const double d = (rho * diff).trace().real();
  const Matrix centered = diff - d * Matrix::Identity(diff.rows(), diff.cols());
  return std::max(0.0, (rho * centered * centered).trace().real());
}

double collision_div(const Matrix& rho, const Matrix& sigma) {
  require_same_dim(rho, sigma, "collision_div");
  if (!support_contained(rho, sigma)) return kInf;
  const Matrix s = psd_power(sigma, -0.25);
  const Matrix m = s * rho * s;
  return std::log2((m * m).trace().real());
}

// ---------------------------------------------------------------------------

DivergenceValue ds_eps(const Matrix& rho, const Matrix& sigma, double eps, double resolution) {
  require_same_dim(rho, sigma, "ds_eps");
  require_eps(eps, "ds_eps");
  if (!(resolution > 0.0)) throw Error(ErrorKind::InvalidParams, "ds_eps: resolution must be > 0");

  if (const auto joint = joint_diagonalize(rho, sigma)) return classical_ds(joint->p, joint->q, eps);

  DivergenceValue out;
  out.epsilon = eps;
  out.resolution = resolution;
  const double rho_norm = spectral_norm(rho);
  const double sigma_norm = spectral_norm(sigma);

  // g(c) = Tr[rho {rho <= c sigma}], the projector onto the non-negative
  // eigenspace of c sigma - rho.
  const auto tail = [&](double log_c) {
    const double c = std::exp2(log_c);
    const auto sd = eig_symmetrized(c * sigma - rho);
    const double tau = 1e-12 * (rho_norm + c * sigma_norm);
    double mass = 0.0;
    for (Eigen::Index j = 0; j < sd.eigenvalues.size(); ++j)
      if (sd.eigenvalues(j) >= -tau) mass += expect(rho, sd.eigenvectors.col(j));
    return mass;
  };

  double top;
  if (support_contained(rho, sigma)) {
    // Above the largest generalized eigenvalue c sigma >= rho and g = 1.
    const Matrix s = psd_power(sigma, -0.5);
    top = std::log2(spectral_norm(s * rho * s)) + 1e-9;
  } else {
    // As c grows, {rho <= c sigma} tends to supp(sigma) plus directions of
    // ker(sigma) that rho does not see, so g tends to Tr[rho P_supp(sigma)].
    const double inside = (rho * support_projector(sigma)).trace().real();
    if (inside <= eps + 1e-12) {
      out.status = Status::PlusInfinity;
      out.value = kInf;
      return out;
    }
    const auto sd = eig_symmetrized(sigma);
    double smallest = sigma_norm;
    for (Eigen::Index j = 0; j < sd.eigenvalues.size(); ++j)
      if (sd.eigenvalues(j) > default_tolerances().support_rel * sigma_norm)
        smallest = std::min(smallest, sd.eigenvalues(j));
    // Well above every finite crossing but small enough that c times the
    // rounding noise on ker(sigma) stays negligible.
    top = std::log2(std::max(rho_norm, 1e-300) / smallest) + 24.0;
  }

  constexpr double kStep = 1.0 / 16.0;
  constexpr double kSpan = 400.0;
  double feasible = top;
  bool found = false;
  for (int k = 1; k * kStep <= kSpan; ++k) {
    feasible = top - k * kStep;
    if (tail(feasible) <= eps) {
      found = true;
      break;
    }
  }
  if (!found) {
    out.status = Status::MinusInfinity;
    out.value = -kInf;
    return out;
  }
  double lo = feasible, hi = feasible + kStep;
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (tail(mid) <= eps)
      lo = mid;
    else
      hi = mid;
  }
  out.value = lo;
  out.log_threshold = lo;
  return out;
}

// ---------------------------------------------------------------------------

DivergenceValue dh_eps(const Matrix& rho, const Matrix& sigma, double eps) {
  require_same_dim(rho, sigma, "dh_eps");
  require_eps(eps, "dh_eps");
  const auto d = static_cast<int>(rho.rows());
  const double target = 1.0 - eps;

  DivergenceValue out;
  out.epsilon = eps;

  const auto finish = [&](Matrix t, bool free_test) {
    TestOperator test{std::move(t), 0.0, 0.0};
    test.alpha = (rho * test.matrix).trace().real();
    test.beta = (sigma * test.matrix).trace().real();
    const auto tev = eig_symmetrized(test.matrix).eigenvalues;
    const double slack = default_tolerances().test_operator;
    if (tev.minCoeff() < -slack || tev.maxCoeff() > 1.0 + slack || test.alpha < target - slack)
      throw Error(ErrorKind::InvariantViolation, "dh_eps: optimal test failed re-verification");
    if (test.beta > 0.0 && !free_test) {
      out.value = -std::log2(test.beta);
    } else {
      out.value = kInf;
      out.status = Status::PlusInfinity;
    }
    out.achiever = std::move(test);
    return out;
  };

  // Everything outside supp(sigma) is free to accept.
  const Matrix outside = identity(d) - support_projector(sigma);
  const double free_mass = (rho * outside).trace().real();
  if (free_mass >= target - 1e-12) return finish((target / free_mass) * outside, true);

  const double rho_norm = spectral_norm(rho);
  const double sigma_norm = spectral_norm(sigma);
  const auto threshold = [&](double c) { return 1e-12 * (rho_norm + c * sigma_norm); };
  // Tr[rho {rho - c sigma > 0}], non-increasing in c.
  const auto accepted = [&](double c) {
    const auto sd = eig_symmetrized(rho - c * sigma);
    const double tau = threshold(c);
    double mass = 0.0;
    for (Eigen::Index j = 0; j < sd.eigenvalues.size(); ++j)
      if (sd.eigenvalues(j) > tau) mass += expect(rho, sd.eigenvectors.col(j));
    return mass;
  };

  double lo = 1.0, hi = 1.0;
  if (accepted(1.0) > target) {
    while (accepted(hi) > target) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) {
        out.status = Status::PlusInfinity;
        out.value = kInf;
        return out;
      }
    }
  } else {
    while (accepted(lo) <= target) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-300) {
        lo = 0.0;
        break;
      }
    }
  }
  for (int iter = 0; iter < 400 && hi - lo > 4e-16 * hi; ++iter) {
    const double mid = (lo > 0.0 && hi / lo > 2.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (accepted(mid) > target)
      lo = mid;
    else
      hi = mid;
  }

  // Optimal test: the strictly positive part of rho - c* sigma plus a
  // partial acceptance on the crossing eigenvectors, filled by decreasing
  // likelihood ratio until Tr[rho T] = 1 - eps.
  const auto sd = eig_symmetrized(rho - hi * sigma);
  const double tau = threshold(hi);
  Matrix t = Matrix::Zero(d, d);
  double mass = 0.0;
  struct Candidate {
    Eigen::Index index;
    double p, q;
  };
  std::vector<Candidate> candidates;
  int kernel_dim = 0;
  for (Eigen::Index j = 0; j < sd.eigenvalues.size(); ++j) {
    const CVector v = sd.eigenvectors.col(j);
    const double p = expect(rho, v);
    if (sd.eigenvalues(j) > tau) {
      t += v * v.adjoint();
      mass += p;
      continue;
    }
    if (sd.eigenvalues(j) >= -tau) ++kernel_dim;
    if (p > 0.0) candidates.push_back({j, p, std::max(expect(sigma, v), 0.0)});
  }
  out.degenerate_crossing = kernel_dim > 1;
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    // p_a / q_a > p_b / q_b without dividing by zero
    return a.p * b.q > b.p * a.q;
  });
  double remaining = target - mass;
  for (const auto& c : candidates) {
    if (remaining <= 0.0) break;
    const double w = std::min(1.0, remaining / c.p);
    const CVector v = sd.eigenvectors.col(c.index);
    t += w * (v * v.adjoint());
    remaining -= w * c.p;
  }
  return finish(std::move(t), false);
}

// ---------------------------------------------------------------------------

Matrix conditioning_operator(const DensityOperator& rho_ab, const std::vector<std::string>& a_labels) {
  const auto& shape = rho_ab.shape();
  std::vector<std::string> b_labels;
  int dim_a = 1;
  for (const auto& label : a_labels) dim_a *= shape.dim_of(label);
  for (const auto& f : shape.factors())
    if (std::find(a_labels.begin(), a_labels.end(), f.label) == a_labels.end())
      b_labels.push_back(f.label);

  const SystemShape shape_a = shape.subset(a_labels);
  if (b_labels.empty()) return identity(dim_a);
  const auto rho_b = partial_trace(rho_ab.matrix(), shape, b_labels);
  const Operator grouped{tensor(identity(dim_a), rho_b.matrix), shape_a.concat(rho_b.shape)};
  return reorder(grouped, shape.labels()).matrix;
}

DivergenceValue cond_dh(const DensityOperator& rho_ab, const std::vector<std::string>& a_labels,
                        double eps) {
  return dh_eps(rho_ab.matrix(), conditioning_operator(rho_ab, a_labels), eps);
}

double cond_hh(const DensityOperator& rho_ab, const std::vector<std::string>& a_labels, double eps) {
  return -cond_dh(rho_ab, a_labels, eps).value;
}

double cond_entropy(const DensityOperator& rho_ab, const std::vector<std::string>& a_labels) {
  return -rel_entropy(rho_ab.matrix(), conditioning_operator(rho_ab, a_labels));
}

double cond_variance(const DensityOperator& rho_ab, const std::vector<std::string>& a_labels) {
  return rel_entropy_variance(rho_ab.matrix(), conditioning_operator(rho_ab, a_labels));
}

}  // namespace qdecouple::divergences
