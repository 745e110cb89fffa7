#include "qdecouple/distill.hpp"

#include <algorithm>
#include <cmath>

#include "qdecouple/bounds.hpp"
#include "qdecouple/divergences.hpp"

namespace qdecouple::distill {

namespace dv = qdecouple::divergences;

const char* const kConditioningNote =
    "conditional entropies are taken on A|E with E the purifying system of rho_AB";

namespace {

std::string fresh_label(const SystemShape& shape) {
  std::string label = "E";
  while (shape.has(label)) label += "'";
  return label;
}

std::vector<double> nonzero_spectrum(const Matrix& m) {
  const auto sd = eig_symmetrized(m);
  const double cut = default_tolerances().support_rel * std::max(sd.eigenvalues(0), 0.0);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i)
    if (sd.eigenvalues(i) > cut) out.push_back(sd.eigenvalues(i));
  return out;
}

}  // namespace

DensityOperator purification_marginal(const DensityOperator& rho_ab,
                                      const std::vector<std::string>& a_labels,
                                      std::string* e_label) {
  for (const auto& label : a_labels)
    if (!rho_ab.shape().has(label)) throw Error(ErrorKind::UnknownLabel, "unknown label " + label);
  const std::string e = fresh_label(rho_ab.shape());
  const DensityOperator pure = purify(rho_ab, e).density();
  std::vector<std::string> keep = a_labels;
  keep.push_back(e);
  if (e_label) *e_label = e;
  return partial_trace(pure, keep);
}

double purification_spectrum_gap(const DensityOperator& rho_ab,
                                 const std::vector<std::string>& a_labels) {
  std::string e;
  const DensityOperator rho_ae = purification_marginal(rho_ab, a_labels, &e);
  const Matrix rho_e = partial_trace(rho_ae.matrix(), rho_ae.shape(), {e}).matrix;
  const auto lhs = nonzero_spectrum(rho_e);
  const auto rhs = nonzero_spectrum(rho_ab.matrix());
  if (lhs.size() != rhs.size()) return 1.0;
  double gap = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) gap = std::max(gap, std::abs(lhs[i] - rhs[i]));
  return gap;
}

DistillReport distill_lower_oneshot(const DensityOperator& rho_ab,
                                    const std::vector<std::string>& a_labels, double eps,
                                    double delta) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::OutOfRange, "eps must lie in (0, 1)");
  if (!(delta > 0.0 && delta < eps / 3.0))
    throw Error(ErrorKind::BadDelta, "distillation bound needs 0 < delta < eps/3");

  std::string e;
  const DensityOperator rho_ae = purification_marginal(rho_ab, a_labels, &e);
  const double gap = purification_spectrum_gap(rho_ab, a_labels);
  if (gap > 1e-9)
    throw Error(ErrorKind::InvariantViolation,
                "purifying system spectrum differs from rho_AB by " + std::to_string(gap));

  const Matrix rho_e = partial_trace(rho_ae.matrix(), rho_ae.shape(), {e}).matrix;
  DistillReport report;
  report.params.eps = eps;
  report.params.delta = delta;
  report.params.nu = dv::spec_count(rho_e).count();
  report.purification_rank = rho_ae.shape().dim_of(e);
  const double hh = dv::cond_hh(rho_ae, a_labels, 1.0 - eps + 3.0 * delta);
  const double nu = report.params.nu;
  report.oneshot_bits = hh - std::log2(nu * nu / std::pow(delta, 4));
  report.notes.push_back(kConditioningNote);
  return report;
}

double distill_second_order(const DensityOperator& rho_ab, const std::vector<std::string>& a_labels,
                            long n, double eps) {
  if (n < 1) throw Error(ErrorKind::InvalidParams, "n must be at least 1");
  const DensityOperator rho_ae = purification_marginal(rho_ab, a_labels);
  const double h = dv::cond_entropy(rho_ae, a_labels);
  const double v = dv::cond_variance(rho_ae, a_labels);
  const double nn = static_cast<double>(n);
  return nn * h + std::sqrt(nn * v) * bounds::phi_inv(eps);
}

double cq_fidelity_decomposition_check(const Ensemble& first, const Ensemble& second) {
  if (first.size() != second.size() || first.empty())
    throw Error(ErrorKind::DimensionMismatch, "ensembles need the same nonzero size");
  const Eigen::Index d = first.front().second.rows();
  const Eigen::Index k = static_cast<Eigen::Index>(first.size());
  Matrix omega = Matrix::Zero(k * d, k * d);
  Matrix tau = Matrix::Zero(k * d, k * d);
  double sum = 0.0;
  for (Eigen::Index x = 0; x < k; ++x) {
    const auto& [p, w] = first[static_cast<std::size_t>(x)];
    const auto& [q, t] = second[static_cast<std::size_t>(x)];
    if (w.rows() != d || t.rows() != d || w.cols() != d || t.cols() != d)
      throw Error(ErrorKind::DimensionMismatch, "ensemble members differ in dimension");
    omega.block(x * d, x * d, d, d) = p * w;
    tau.block(x * d, x * d, d, d) = q * t;
    sum += std::sqrt(p * q) * fidelity(w, t);
  }
  return std::abs(fidelity(omega, tau) - sum);
}

}  // namespace qdecouple::distill
