#include "qdecouple/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace qdecouple::oracles {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  double log_ratio;  // log p - log q, +inf when q = 0
  double p;
  double q;
};

struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

/// Accepts outcomes in order of decreasing log-ratio (stable on ties) until
/// the p-mass reaches 1 - eps; returns the test weights in input order.
NeymanPearson neyman_pearson(const std::vector<Outcome>& outcomes, double eps) {
  std::vector<std::size_t> order(outcomes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return outcomes[a].log_ratio > outcomes[b].log_ratio;
  });
  NeymanPearson out;
  out.test.assign(outcomes.size(), 0.0);
  double need = 1.0 - eps;
  Kahan accepted_q;
  for (const auto i : order) {
    if (need <= 0.0) break;
    const auto& o = outcomes[i];
    if (!(o.p > 0.0)) continue;
    const double w = o.p >= need ? need / o.p : 1.0;
    out.test[i] = w;
    accepted_q.add(w * o.q);
    need -= w * o.p;
    if (w < 1.0) need = 0.0;
  }
  out.value = accepted_q.sum > 0.0 ? -std::log2(accepted_q.sum) : kInf;
  return out;
}

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw Error(ErrorKind::OutOfRange, "epsilon must lie in (0, 1)");
}

double log_ratio(double p, double q) {
  if (!(q > 0.0)) return kInf;
  return std::log(p) - std::log(q);
}

void enumerate_types(int n, std::size_t k, std::vector<int>& current,
                     const std::function<void(const std::vector<int>&)>& visit) {
  if (current.size() + 1 == k) {
    current.push_back(n);
    visit(current);
    current.pop_back();
    return;
  }
  for (int t = n; t >= 0; --t) {
    current.push_back(t);
    enumerate_types(n - t, k, current, visit);
    current.pop_back();
  }
}

double binomial(double n, double k) {
  return std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1));
}

}  // namespace

ClassicalPair::ClassicalPair(std::vector<double> p_in, std::vector<double> q_in)
    : p(std::move(p_in)), q(std::move(q_in)) {
  if (p.size() != q.size() || p.empty())
    throw Error(ErrorKind::DimensionMismatch, "ClassicalPair: p and q need the same non-empty alphabet");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || q[i] < 0.0)
      throw Error(ErrorKind::InvalidParams, "ClassicalPair: negative weight");
    total += p[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw Error(ErrorKind::InvalidParams, "ClassicalPair: p does not sum to 1");
}

NeymanPearson classical_np(const ClassicalPair& pair, double eps) {
  require_eps(eps);
  std::vector<Outcome> outcomes;
  for (std::size_t i = 0; i < pair.p.size(); ++i)
    outcomes.push_back({log_ratio(pair.p[i], pair.q[i]), pair.p[i], pair.q[i]});
  return neyman_pearson(outcomes, eps);
}

IidResult iid_classical_dh(const ClassicalPair& pair, int n, double eps) {
  require_eps(eps);
  const std::size_t k = pair.p.size();
  if (n < 1) throw Error(ErrorKind::OutOfRange, "iid_classical_dh: n must be >= 1");
  if (k > 4 || n > 512) throw Error(ErrorKind::TooLarge, "iid_classical_dh: needs alphabet <= 4 and n <= 512");
  const double type_count = binomial(n + static_cast<double>(k) - 1, static_cast<double>(k) - 1);
  if (type_count > 1e6) throw Error(ErrorKind::TooLarge, "iid_classical_dh: more than 10^6 types");

  std::vector<double> log_p(k), log_q(k);
  for (std::size_t i = 0; i < k; ++i) {
    log_p[i] = std::log(pair.p[i]);
    log_q[i] = std::log(pair.q[i]);
  }

  IidResult result;
  std::vector<Outcome> outcomes;
  std::vector<int> current;
  enumerate_types(n, k, current, [&](const std::vector<int>& t) {
    ++result.types;
    double log_coef = std::lgamma(n + 1.0);
    double lr = 0.0, lp = 0.0, lq = 0.0;
    double direct_p = 1.0, direct_q = 1.0;
    bool p_zero = false, q_zero = false;
    for (std::size_t i = 0; i < k; ++i) {
      log_coef -= std::lgamma(t[i] + 1.0);
      if (t[i] == 0) continue;
      if (!(pair.p[i] > 0.0)) p_zero = true;
      if (!(pair.q[i] > 0.0)) q_zero = true;
      lr += t[i] * (log_p[i] - log_q[i]);
      lp += t[i] * log_p[i];
      lq += t[i] * log_q[i];
      direct_p *= std::pow(pair.p[i], t[i]);
      direct_q *= std::pow(pair.q[i], t[i]);
    }
    if (p_zero) return;
    // Direct products keep single-letter masses bit-exact; log space avoids
    // overflow of the multinomial coefficient for long blocks.
    const bool direct = log_coef < 700.0 && direct_p > 1e-290;
    double mp = direct ? std::exp(log_coef) * direct_p : std::exp(log_coef + lp);
    double mq = q_zero ? 0.0
                       : (direct && direct_q > 1e-290 ? std::exp(log_coef) * direct_q
                                                      : std::exp(log_coef + lq));
    if (mp < 1e-300) {
      result.dropped_mass += 1e-300;
      return;
    }
    if (q_zero) lr = kInf;
    outcomes.push_back({lr, mp, mq});
  });
  result.value = neyman_pearson(outcomes, eps).value;
  return result;
}

double grid_dh_dim2(const Matrix& rho, const Matrix& sigma, double eps, int steps, int zoom_levels) {
  require_eps(eps);
  if (rho.rows() != 2 || rho.cols() != 2 || sigma.rows() != 2 || sigma.cols() != 2)
    throw Error(ErrorKind::DimensionMismatch, "grid_dh_dim2 needs 2x2 operands");
  if (steps < 1) throw Error(ErrorKind::InvalidParams, "grid_dh_dim2: steps must be >= 1");

  // Polar axis along the Bloch vector of rho: the kink where <v|rho|v> = 1 - eps
  // is then a circle of constant theta.
  const Matrix frame = Eigen::SelfAdjointEigenSolver<Matrix>(rho).eigenvectors().rowwise().reverse();
  const auto evaluate = [&](double theta, double phi) {
    const Complex e(std::cos(phi), std::sin(phi));
    CVector w1(2), w2(2);
    w1 << std::cos(theta / 2), e * std::sin(theta / 2);
    w2 << -std::conj(e) * std::sin(theta / 2), std::cos(theta / 2);
    const CVector v1 = frame * w1, v2 = frame * w2;
    std::vector<double> p(2), q(2);
    p[0] = std::max(0.0, v1.dot(rho * v1).real());
    p[1] = std::max(0.0, v2.dot(rho * v2).real());
    q[0] = std::max(0.0, v1.dot(sigma * v1).real());
    q[1] = std::max(0.0, v2.dot(sigma * v2).real());
    const double total = p[0] + p[1];
    p[0] /= total;
    p[1] /= total;
    return classical_np(ClassicalPair(p, q), eps).value;
  };

  double best = -kInf;
  double best_theta = 0.0, best_phi = 0.0;
  for (int i = 0; i <= steps; ++i)
    for (int j = 0; j < steps; ++j) {
      const double theta = std::numbers::pi * i / steps;
      const double phi = 2.0 * std::numbers::pi * j / steps;
      const double v = evaluate(theta, phi);
      if (v > best) {
        best = v;
        best_theta = theta;
        best_phi = phi;
      }
    }

  double half_theta = std::numbers::pi / steps;
  double half_phi = 2.0 * std::numbers::pi / steps;
  constexpr int kZoomPoints = 20;
  for (int level = 0; level < zoom_levels; ++level) {
    const double center_theta = best_theta, center_phi = best_phi;
    for (int i = 0; i <= kZoomPoints; ++i)
      for (int j = 0; j <= kZoomPoints; ++j) {
        const double theta = center_theta + half_theta * (2.0 * i / kZoomPoints - 1.0);
        const double phi = center_phi + half_phi * (2.0 * j / kZoomPoints - 1.0);
        const double v = evaluate(theta, phi);
        if (v > best) {
          best = v;
          best_theta = theta;
          best_phi = phi;
        }
      }
    half_theta /= 4.0;
    half_phi /= 4.0;
  }
  return best;
}

double normal_cdf(double x) {
  if (std::isnan(x)) return x;
  const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  if (std::abs(x) < 3.0) {
    double term = x, sum = x;
    for (int k = 1; k < 500; ++k) {
      term *= x * x / (2.0 * k + 1.0);
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return 0.5 + density * sum;
  }
  // Upper tail Q(|x|) = density / (|x| + 1/(|x| + 2/(|x| + ...))).
  const double a = std::abs(x);
  double frac = a;
  for (int k = 400; k >= 1; --k) frac = a + k / frac;
  const double upper = density / frac;
  return x > 0.0 ? 1.0 - upper : upper;
}

double phi_inv_bisect(double eps) {
  if (!(eps >= 1e-12 && eps <= 1.0 - 1e-12))
    throw Error(ErrorKind::OutOfRange, "phi_inv_bisect: epsilon outside [1e-12, 1 - 1e-12]");
  if (eps > 0.5) return -phi_inv_bisect(1.0 - eps);
  double lo = -40.0, hi = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (normal_cdf(mid) < eps)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace qdecouple::oracles
