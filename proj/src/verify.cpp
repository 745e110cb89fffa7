#include "qdecouple/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qdecouple/decoupling.hpp"
#include "qdecouple/divergences.hpp"
#include "qdecouple/qmat.hpp"

namespace qdecouple::verify {

namespace dv = qdecouple::divergences;

namespace {

class Recorder {
 public:
  explicit Recorder(SuiteResult& r) : r_(r) {}

  /// Passes when lhs <= rhs + kSlack * max(1, |rhs|).
  void leq(double lhs, double rhs, int instance, const char* what) {
    ++r_.checks;
    double excess = lhs - rhs;
    if (std::isinf(lhs) || std::isinf(rhs)) excess = (lhs <= rhs) ? 0.0 : INFINITY;
    if (std::isnan(excess)) excess = INFINITY;
    const double slack = kSlack * std::max(1.0, std::isfinite(rhs) ? std::abs(rhs) : 1.0);
    if (excess <= slack) {
      ++r_.passed;
      return;
    }
    r_.worst_violation = std::max(r_.worst_violation, excess);
    if (r_.failures.size() < 5) {
      std::ostringstream os;
      os.precision(12);
      os << "instance " << instance << ": " << what << " lhs=" << lhs << " rhs=" << rhs;
      r_.failures.push_back(os.str());
    }
  }

  void near(double a, double b, int instance, const char* what) {
    leq(std::abs(a - b), 0.0, instance, what);
  }

 private:
  SuiteResult& r_;
};

int uniform_int(RngStream& s, int lo, int hi) {
  return lo + static_cast<int>(s.uniform() * (hi - lo + 1));
}

double uniform(RngStream& s, double lo, double hi) { return lo + (hi - lo) * s.uniform(); }

Matrix random_psd(int d, RngStream& s, bool full_rank) {
  const int rank = full_rank ? d : uniform_int(s, 1, d);
  return random_density(d, rank, s).matrix() * std::exp2(uniform(s, -2.0, 2.0));
}

/// Hermitian matrix whose eigenvalues are drawn from a small integer set, so
/// that degenerate spectra appear regularly.
Matrix degenerate_hermitian(int d, RngStream& s) {
  RVector ev(d);
  for (int i = 0; i < d; ++i) ev(i) = uniform_int(s, -2, 2);
  const Matrix u = sample_haar_unitary(d, s).matrix();
  return u * ev.cast<Complex>().asDiagonal() * u.adjoint();
}

double exp_collision(const Matrix& rho, const Matrix& sigma) {
  return std::exp2(dv::collision_div(rho, sigma));
}

void suite_pinching(Recorder& rec, int instances, RngStream& root) {
  for (int i = 0; i < instances; ++i) {
    RngStream s = root.substream(i);
    const int d = uniform_int(s, 2, 4);
    const Matrix h = (i % 2 == 0) ? degenerate_hermitian(d, s) : random_hermitian(d, s);
    const Matrix l = random_psd(d, s, false);
    const int nu = dv::spec_count(h).count();
    const Matrix gap = dv::pinch(l, h) - l / static_cast<double>(nu);
    rec.leq(-eig_symmetrized(gap).eigenvalues.minCoeff(), 0.0, i, "P_H[L] >= L/|spec(H)|");

    const int dd = uniform_int(s, 2, 3);
    const int n = uniform_int(s, 1, 5);
    const Matrix hh = (i % 3 == 0) ? degenerate_hermitian(dd, s) : random_hermitian(dd, s);
    Matrix power = hh;
    for (int k = 1; k < n; ++k) power = tensor(power, hh);
    rec.leq(dv::spec_count(power).count(), std::pow(n + 1.0, dd - 1), i,
            "|spec(H^n)| <= (n+1)^(d-1)");
  }
}

void suite_relation(Recorder& rec, int instances, RngStream& root) {
  for (int i = 0; i < instances; ++i) {
    RngStream s = root.substream(i);
    const int d = uniform_int(s, 2, 3);
    const Matrix rho = random_density(d, uniform_int(s, 1, d), s).matrix();
    const Matrix sigma = random_psd(d, s, i % 4 != 0);
    const double eps = uniform(s, 0.05, 0.95);
    const double delta = std::min(eps, 1.0 - eps) * uniform(s, 0.05, 0.95);
    const double log_nu = std::log2(dv::spec_count(sigma).count());

    // D_s is bracketed by [value, value + resolution]; use the side that
    // makes each inequality hardest to satisfy.
    const auto ds_pinched = dv::ds_eps(dv::pinch(rho, sigma), sigma, eps - delta);
    const auto dh_plus = dv::dh_eps(rho, sigma, eps + delta);
    rec.leq(ds_pinched.value + ds_pinched.resolution,
            dh_plus.value + log_nu - 2.0 * std::log2(delta), i, "D_s(P[rho]) bound");

    const auto dh = dv::dh_eps(rho, sigma, eps);
    const auto ds_plus = dv::ds_eps(rho, sigma, eps + delta);
    rec.leq(dh.value, ds_plus.value - std::log2(delta), i, "D_h <= D_s - log delta");
  }
}

void suite_swap(Recorder& rec, int instances, RngStream& root) {
  for (int i = 0; i < instances; ++i) {
    RngStream s = root.substream(i);
    const int d = uniform_int(s, 2, 4);
    const Matrix a = ginibre(d, d, s);
    const Matrix b = ginibre(d, d, s);
    const Complex lhs = (a * b).trace();
    const Complex rhs = (tensor(a, b) * swap_operator(d)).trace();
    rec.leq(std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)), 0.0, i, "Tr[AA'] = Tr[(A x A')F]");
  }
}

void suite_cauchy_schwarz(Recorder& rec, int instances, RngStream& root) {
  for (int i = 0; i < instances; ++i) {
    RngStream s = root.substream(i);
    const int d = uniform_int(s, 2, 4);
    const Matrix x = ginibre(d, d, s);
    const Matrix rho = random_density(d, d, s).matrix();
    const double rhs = std::sqrt((x.adjoint() * x * psd_power(rho, -1.0)).trace().real());
    rec.leq(trace_norm(x), rhs, i, "||X||_1 <= sqrt(Tr[X^dag X rho^-1])");
  }
}

void suite_joint_convexity(Recorder& rec, int instances, RngStream& root) {
  for (int i = 0; i < instances; ++i) {
    RngStream s = root.substream(i);
    const int d = uniform_int(s, 2, 4);
    const Matrix r1 = random_psd(d, s, false);
    const Matrix r2 = random_psd(d, s, false);
    const Matrix s1 = random_psd(d, s, true);
    const Matrix s2 = random_psd(d, s, true);
    const double mid = exp_collision(0.5 * (r1 + r2), 0.5 * (s1 + s2));
    const double avg = 0.5 * exp_collision(r1, s1) + 0.5 * exp_collision(r2, s2);
    rec.leq(mid, avg, i, "exp D2* midpoint convexity");
  }
}

void suite_collision_lower(Recorder& rec, int instances, RngStream& root) {
  for (int i = 0; i < instances; ++i) {
    RngStream s = root.substream(i);
    const int d = uniform_int(s, 2, 3);
    const Matrix rho = random_density(d, uniform_int(s, 1, d), s).matrix();
    const Matrix sigma = random_psd(d, s, i % 3 != 0);
    const double eta = uniform(s, 0.05, 0.95);
    const double l1 = std::exp2(uniform(s, -3.0, 2.0));
    const double l2 = std::exp2(uniform(s, -3.0, 2.0));
    const auto ds = dv::ds_eps(rho, sigma, eta);
    const double ds_hi = ds.value + ds.resolution;
    const double rhs = (1.0 - eta) / (l1 + l2 * std::exp2(-ds_hi));
    rec.leq(rhs, exp_collision(rho, l1 * rho + l2 * sigma), i, "exp D2* >= (1-eta)/(l1 + l2 2^-Ds)");
  }
}

void suite_variational(Recorder& rec, int instances, RngStream& root) {
  for (int i = 0; i < instances; ++i) {
    RngStream s = root.substream(i);
    const int d = uniform_int(s, 2, 4);
    const Matrix rho = random_density(d, uniform_int(s, 1, d), s).matrix();
    const Matrix sigma = random_density(d, uniform_int(s, 1, d), s).matrix();
    const double td = trace_distance(rho, sigma);
    const Matrix diff = rho - sigma;
    const Matrix positive = hermitian_function(diff, [](double x) { return x > 0.0 ? 1.0 : 0.0; });
    rec.near((positive * diff).trace().real(), td, i, "Tr[Pi_+(rho - sigma)] = trace distance");
    // A random test 0 <= Pi <= 1 never beats the positive-part projector.
    const Matrix u = sample_haar_unitary(d, s).matrix();
    RVector w(d);
    for (int k = 0; k < d; ++k) w(k) = s.uniform();
    const Matrix pi = u * w.cast<Complex>().asDiagonal() * u.adjoint();
    rec.leq((pi * diff).trace().real(), td, i, "Tr[Pi(rho - sigma)] <= trace distance");
  }
}

void suite_choi(Recorder& rec, int instances, RngStream& root) {
  for (int i = 0; i < instances; ++i) {
    RngStream s = root.substream(i);
    const int da = uniform_int(s, 2, 3);
    const int db = uniform_int(s, 2, 3);
    const int kraus = uniform_int(s, (da + db - 1) / db, 3);
    // Kraus operators from an isometry A -> B (x) K.
    const Matrix g = ginibre(db * kraus, da, s);
    const Matrix v = Eigen::HouseholderQR<Matrix>(g).householderQ() * Matrix::Identity(db * kraus, da);
    std::vector<Matrix> ks;
    for (int k = 0; k < kraus; ++k) {
      Matrix kk(db, da);
      for (int b = 0; b < db; ++b) kk.row(b) = v.row(b * kraus + k);
      ks.push_back(kk);
    }
    const auto channel = [&](const Matrix& x) {
      Matrix out = Matrix::Zero(db, db);
      for (const auto& kk : ks) out += kk * x * kk.adjoint();
      return out;
    };
    Matrix gamma = Matrix::Zero(da * db, da * db);
    for (int r = 0; r < da; ++r)
      for (int c = 0; c < da; ++c) {
        Matrix e = Matrix::Zero(da, da);
        e(r, c) = 1.0;
        gamma.block(r * db, c * db, db, db) = channel(e);
      }
    // Partial transpose on the first factor swaps the block positions.
    Matrix gamma_t(da * db, da * db);
    for (int r = 0; r < da; ++r)
      for (int c = 0; c < da; ++c) gamma_t.block(r * db, c * db, db, db) = gamma.block(c * db, r * db, db, db);

    const SystemShape shape({{"A'", da}, {"B", db}});
    const Matrix x = ginibre(da, da, s);
    const Matrix expected = channel(x);
    const Matrix x1 = tensor(Matrix(x.transpose()), identity(db));
    const Matrix x2 = tensor(x, identity(db));
    const Matrix first = partial_trace(x1 * gamma, shape, {"B"}).matrix;
    const Matrix second = partial_trace(gamma_t * x2, shape, {"B"}).matrix;
    const double scale = std::max(1.0, expected.norm());
    rec.leq((first - expected).norm() / scale, 0.0, i, "T(X) = Tr_A'[(X^T x 1) Gamma]");
    rec.leq((second - expected).norm() / scale, 0.0, i, "T(X) = Tr_A'[Gamma^T (X x 1)]");
    // Trace preservation shows up as Tr_B Gamma = 1.
    const Matrix tb = partial_trace(gamma, shape, {"A'"}).matrix;
    rec.leq((tb - identity(da)).norm(), 0.0, i, "Tr_B Gamma = 1");
  }
}

void suite_haar_average(Recorder& rec, int instances, RngStream& root, std::uint64_t seed) {
  constexpr std::size_t kSamples = 2000;
  const int runs = std::max(1, instances / 10);
  for (int i = 0; i < runs; ++i) {
    RngStream s = root.substream(i);
    const int dim_e = uniform_int(s, 1, 2);
    const int dim_c = (i % 3 == 0) ? 1 : (i % 3 == 1 ? 2 : 4);
    const auto split = decoupling::DecouplingSplit::from_remainder(4, dim_c, dim_e);
    const Matrix sigma = random_density(4 * dim_e, 4 * dim_e, s).matrix();
    const Matrix exact = decoupling::haar_average_exact(sigma, split);
    const Matrix mc = decoupling::haar_average_mc(sigma, split, kSamples, mix64(seed + i));
    rec.leq((mc - exact).norm(), 6.0 / std::sqrt(static_cast<double>(kSamples)), i,
            "||MC - exact||_F <= 6/sqrt(N)");
    // The twirled map multiplies the trace by |A1|.
    rec.near(exact.trace().real(), split.dim_a1 * sigma.trace().real(), i, "Tr of exact average");
  }
}

void suite_randomizing(Recorder& rec, int instances, RngStream& root, std::uint64_t seed) {
  constexpr std::size_t kSamples = 1000;
  const int runs = std::min(instances, 20);
  for (int i = 0; i < runs; ++i) {
    RngStream s = root.substream(i);
    const int dim_a1 = uniform_int(s, 1, 2) * 2;
    const int dim_c = uniform_int(s, 1, 2);
    const int dim_e = uniform_int(s, 1, 2);
    const decoupling::DecouplingSplit split{dim_a1, dim_c, dim_e};
    const int d = split.dim_a() * dim_e;
    const Matrix x = ginibre(d, d, s);
    const auto stat = decoupling::randomizing_statistic(x, split, kSamples, mix64(seed ^ (i + 1)));
    rec.leq(stat.mean, stat.bound + 3.0 * stat.std_error, i, "E||(T - U)(X)||_2 <= |A1|^-1/2 ||X||_2");
  }
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "pinching",        "relation",    "swap", "cauchy_schwarz", "joint_convexity",
      "collision_lower", "variational", "choi", "haar_average",   "randomizing"};
  return names;
}

bool has_suite(const std::string& name) {
  const auto& n = suite_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

SuiteResult run_suite(const std::string& name, int instances, std::uint64_t seed) {
  if (!has_suite(name)) throw Error(ErrorKind::InvalidParams, "unknown suite " + name);
  if (instances < 1) throw Error(ErrorKind::InvalidParams, "instances must be positive");
  const auto& names = suite_names();
  const auto index = static_cast<std::uint64_t>(std::find(names.begin(), names.end(), name) - names.begin());

  SuiteResult result;
  result.name = name;
  result.seed = seed;
  Recorder rec(result);
  RngStream root(seed, 1000 + index);
  if (name == "pinching") suite_pinching(rec, instances, root);
  else if (name == "relation") suite_relation(rec, instances, root);
  else if (name == "swap") suite_swap(rec, instances, root);
  else if (name == "cauchy_schwarz") suite_cauchy_schwarz(rec, instances, root);
  else if (name == "joint_convexity") suite_joint_convexity(rec, instances, root);
  else if (name == "collision_lower") suite_collision_lower(rec, instances, root);
  else if (name == "variational") suite_variational(rec, instances, root);
  else if (name == "choi") suite_choi(rec, instances, root);
  else if (name == "haar_average") suite_haar_average(rec, instances, root, seed);
  else suite_randomizing(rec, instances, root, seed);

  if (name == "haar_average") result.instances = std::max(1, instances / 10);
  else if (name == "randomizing") result.instances = std::min(instances, 20);
  else result.instances = instances;
  return result;
}

std::vector<SuiteResult> run_all(int instances, std::uint64_t seed) {
  std::vector<SuiteResult> out;
  for (const auto& name : suite_names()) out.push_back(run_suite(name, instances, seed));
  return out;
}

}  // namespace qdecouple::verify
