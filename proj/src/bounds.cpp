#include "qdecouple/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "qdecouple/divergences.hpp"

namespace qdecouple::bounds {

namespace dv = qdecouple::divergences;

const char* const kConverseRangeNote =
    "upper bound evaluated with c*delta > 1 so that delta - 1/c > 0";

namespace {

std::vector<std::string> complement(const DensityOperator& rho, const std::vector<std::string>& a) {
  for (const auto& label : a)
    if (!rho.shape().has(label)) throw Error(ErrorKind::UnknownLabel, "unknown label " + label);
  std::vector<std::string> rest;
  for (const auto& label : rho.shape().labels())
    if (std::find(a.begin(), a.end(), label) == a.end()) rest.push_back(label);
  return rest;
}

Matrix marginal_e(const DensityOperator& rho, const std::vector<std::string>& a) {
  const auto rest = complement(rho, a);
  if (rest.empty()) return Matrix::Ones(1, 1);
  return partial_trace(rho.matrix(), rho.shape(), rest).matrix;
}

bool valid_lower_delta(double eps, double delta) { return delta > 0.0 && delta < eps / 3.0; }

bool valid_upper_params(double eps, double delta, double c) {
  return delta > 0.0 && delta < std::min(eps / 3.0, (1.0 - eps) / 2.0) && c * delta > 1.0;
}

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::OutOfRange, "eps must lie in (0, 1)");
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

double log2_dim(const DensityOperator& rho_ae, const std::vector<std::string>& a_labels) {
  double bits = 0.0;
  for (const auto& label : a_labels) bits += std::log2(static_cast<double>(rho_ae.shape().dim_of(label)));
  return bits;
}

int spectrum_size_e(const DensityOperator& rho_ae, const std::vector<std::string>& a_labels) {
  return dv::spec_count(marginal_e(rho_ae, a_labels)).count();
}

double theorem1_lower(const DensityOperator& rho_ae, const std::vector<std::string>& a_labels,
                      double eps, double delta) {
  check_eps(eps);
  if (!valid_lower_delta(eps, delta))
    throw Error(ErrorKind::BadDelta, "lower bound needs 0 < delta < eps/3");
  const double hh = dv::cond_hh(rho_ae, a_labels, 1.0 - eps + 3.0 * delta);
  return lower_from_entropy(log2_dim(rho_ae, a_labels), hh, spectrum_size_e(rho_ae, a_labels), delta);
}

double lower_from_entropy(double log2_a, double hh, int nu, double delta) {
  return 0.5 * (log2_a + hh) - std::log2(nu / (delta * delta));
}

double upper_from_entropy(double log2_a, double hh, double eps, double delta, double c) {
  return 0.5 * (log2_a + hh + upper_penalty(eps, delta, c));
}

double upper_penalty(double eps, double delta, double c) {
  const double arg = (1.0 + c) * (eps + 1.0 / c) / (delta * (delta - 1.0 / c));
  if (!(arg > 0.0) || !std::isfinite(arg))
    throw Error(ErrorKind::InvalidParams, "upper bound log argument is not positive");
  return std::log2(arg);
}

double theorem1_upper(const DensityOperator& rho_ae, const std::vector<std::string>& a_labels,
                      double eps, double delta, double c) {
  check_eps(eps);
  if (!valid_upper_params(eps, delta, c))
    throw Error(ErrorKind::InvalidParams,
                "upper bound needs 0 < delta < min(eps/3, (1-eps)/2) and c*delta > 1");
  const double hh = dv::cond_hh(rho_ae, a_labels, 1.0 - eps - 2.0 * delta);
  return upper_from_entropy(log2_dim(rho_ae, a_labels), hh, eps, delta, c);
}

double pmain_certificate(const DensityOperator& rho_ae, const decoupling::DecouplingSplit& split,
                         double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::InvalidParams, "c must be positive");
  const int da = split.dim_a();
  const int de = split.dim_e;
  if (rho_ae.dim() != da * de)
    throw Error(ErrorKind::DimensionMismatch, "state does not match the split");
  const Matrix& rho = rho_ae.matrix();
  Matrix rho_e = Matrix::Zero(de, de);
  for (int a = 0; a < da; ++a) rho_e += rho.block(a * de, a * de, de, de);

  const Matrix sigma = tensor(identity(da), rho_e);
  const dv::SpectrumPartition part = dv::spec_count(sigma);
  const double floor = default_tolerances().support_rel * std::max(1.0, part.spectral.eigenvalues(0));

  // Eigenvalues of the pinched state, paired with the block eigenvalue of sigma.
  std::vector<std::pair<double, double>> pq;
  for (std::size_t g = 0; g < part.groups.size(); ++g) {
    const double lambda = part.groups[g].representative;
    const auto& idx = part.groups[g].indices;
    Matrix v(sigma.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) v.col(static_cast<Eigen::Index>(k)) = part.spectral.eigenvectors.col(idx[k]);
    const Matrix block = v.adjoint() * rho * v;
    const SpectralDecomposition sd = eig_symmetrized(block);
    for (Eigen::Index k = 0; k < sd.eigenvalues.size(); ++k)
      pq.emplace_back(std::max(0.0, sd.eigenvalues(k)), lambda > floor ? lambda : 0.0);
  }

  const double tie = default_tolerances().spectrum_rel;
  for (const auto& [p, q] : pq)
    if (q > 0.0 && std::abs(p - c * q) <= tie * std::max(p, c * q)) {
      c *= 1.0 + 1e-9;
      break;
    }

  double first = 0.0;
  for (const auto& [p, q] : pq)
    if (p > c * q) first += p;
  first = std::min(1.0, first);

  const double nu = dv::spec_count(rho_e).count();
  const double lambda = std::sqrt(static_cast<double>(split.dim_c) / da);
  return first + lambda * std::sqrt(c * nu * split.dim_c);
}

std::vector<double> log_space(double lo, double hi, int count, bool include_hi) {
  std::vector<double> out;
  if (count <= 0 || !(lo > 0.0) || !(hi > lo)) return out;
  const double denom = include_hi ? std::max(1, count - 1) : count;
  for (int k = 0; k < count; ++k) out.push_back(lo * std::pow(hi / lo, k / denom));
  return out;
}

Theorem1Grid Theorem1Grid::defaults(double eps) {
  Theorem1Grid g;
  g.delta_lower = log_space(1e-3, eps / 3.0, 20, false);
  g.delta_upper = log_space(1e-3, std::min(eps / 3.0, (1.0 - eps) / 2.0), 20, false);
  return g;
}

std::vector<double> default_c_grid(double delta) {
  return log_space(1.01 / delta, 1e4, 20, true);
}

BoundReport optimize_theorem1(const DensityOperator& rho_ae,
                              const std::vector<std::string>& a_labels, double eps,
                              const Theorem1Grid& grid) {
  check_eps(eps);
  BoundReport report;
  report.params.eps = eps;
  report.params.nu = spectrum_size_e(rho_ae, a_labels);
  report.params.spec_tolerance = default_tolerances().spectrum_rel;
  report.params.log2_a = log2_dim(rho_ae, a_labels);
  report.lower_bits = -std::numeric_limits<double>::infinity();
  report.upper_bits = std::numeric_limits<double>::infinity();

  std::vector<double> deltas = grid.delta_lower;
  deltas.insert(deltas.end(), grid.delta_upper.begin(), grid.delta_upper.end());
  std::sort(deltas.begin(), deltas.end());
  deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());
  auto in = [](const std::vector<double>& v, double x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };

  for (double delta : deltas) {
    GridPoint base;
    base.delta = delta;
    if (in(grid.delta_lower, delta) && valid_lower_delta(eps, delta)) {
      base.lower_bits = theorem1_lower(rho_ae, a_labels, eps, delta);
      base.valid_lower = true;
      if (!report.valid_lower || base.lower_bits > report.lower_bits) {
        report.lower_bits = base.lower_bits;
        report.params.delta_lower = delta;
        report.valid_lower = true;
      }
    }
    const bool upper_delta = in(grid.delta_upper, delta);
    const double hh_upper = upper_delta && delta < (1.0 - eps) / 2.0 && delta < eps / 3.0
                                ? dv::cond_hh(rho_ae, a_labels, 1.0 - eps - 2.0 * delta)
                                : 0.0;
    const std::vector<double> cs = grid.c.empty() ? default_c_grid(delta) : grid.c;
    for (double c : cs) {
      GridPoint pt = base;
      pt.c = c;
      if (upper_delta && valid_upper_params(eps, delta, c)) {
        pt.upper_bits = upper_from_entropy(report.params.log2_a, hh_upper, eps, delta, c);
        pt.valid_upper = true;
        if (!report.valid_upper || pt.upper_bits < report.upper_bits) {
          report.upper_bits = pt.upper_bits;
          report.params.delta_upper = delta;
          report.params.c = c;
          report.valid_upper = true;
        }
      }
      report.grid.push_back(pt);
    }
  }

  if (!report.valid_lower && !report.valid_upper)
    throw Error(ErrorKind::NoValidParams, "no grid point satisfies either validity range");
  if (!report.valid_lower)
    report.notes.push_back("no valid delta for the lower bound (need 0 < delta < eps/3)");
  if (!report.valid_upper)
    report.notes.push_back(
        "no valid (delta, c) for the upper bound (need delta < min(eps/3, (1-eps)/2), c*delta > 1)");
  report.notes.push_back(kConverseRangeNote);
  report.notes.push_back("nu = " + std::to_string(report.params.nu) + " distinct eigenvalues of rho_E at relative tolerance " + fmt(report.params.spec_tolerance));
  return report;
}

BoundReport optimize_theorem1(const DensityOperator& rho_ae,
                              const std::vector<std::string>& a_labels, double eps) {
  return optimize_theorem1(rho_ae, a_labels, eps, Theorem1Grid::defaults(eps));
}

double phi_inv(double eps) {
  if (!(eps >= 1e-12 && eps <= 1.0 - 1e-12))
    throw Error(ErrorKind::OutOfRange, "phi_inv needs eps in [1e-12, 1 - 1e-12]");
  return boost::math::quantile(boost::math::normal_distribution<double>(), eps);
}

double second_order_rate(const DensityOperator& rho_ae, const std::vector<std::string>& a_labels,
                         long n, double eps) {
  if (n < 1) throw Error(ErrorKind::InvalidParams, "n must be at least 1");
  check_eps(eps);
  const double h = dv::cond_entropy(rho_ae, a_labels);
  const double v = dv::cond_variance(rho_ae, a_labels);
  const double nn = static_cast<double>(n);
  return nn * 0.5 * (log2_dim(rho_ae, a_labels) + h) + 0.5 * std::sqrt(nn * v) * phi_inv(eps);
}

double moderate_rate(const DensityOperator& rho_ae, const std::vector<std::string>& a_labels,
                     double a_n, ErrorSide side) {
  if (!(a_n > 0.0)) throw Error(ErrorKind::InvalidParams, "a_n must be positive");
  const double first = 0.5 * (log2_dim(rho_ae, a_labels) + dv::cond_entropy(rho_ae, a_labels));
  const double spread = std::sqrt(dv::cond_variance(rho_ae, a_labels) / 2.0) * a_n;
  return side == ErrorSide::Small ? first - spread : first + spread;
}

ModerateCheck check_moderate_sequence(const ModerateSequence& seq, long n_min, long n_max) {
  ModerateCheck out;
  if (!(seq.scale > 0.0)) {
    out.warnings.push_back("scale must be positive");
    return out;
  }
  if (n_min < 1 || n_max <= n_min) {
    out.warnings.push_back("n range must satisfy 1 <= n_min < n_max");
    return out;
  }
  out.admissible = seq.power > 0.0 && seq.power < 0.5;
  if (seq.power <= 0.0) out.warnings.push_back("a_n does not tend to 0 (power <= 0)");
  if (seq.power >= 0.5) out.warnings.push_back("n a_n^2 does not diverge (power >= 1/2)");

  auto a = [&](double n) { return seq.scale * std::pow(n, -seq.power); };
  const double lo = static_cast<double>(n_min);
  const double hi = static_cast<double>(n_max);
  if (!(a(hi) < a(lo))) out.warnings.push_back("a_n is not decreasing on the requested range");
  if (!(hi * a(hi) * a(hi) > lo * a(lo) * a(lo)))
    out.warnings.push_back("n a_n^2 is not increasing on the requested range");
  if (a(hi) >= 1.0) out.warnings.push_back("a_n is still >= 1 at n_max");
  return out;
}

}  // namespace qdecouple::bounds
