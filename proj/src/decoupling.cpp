#include "qdecouple/decoupling.hpp"

#include <cmath>
#include <string>

#include "qdecouple/parallel.hpp"

namespace qdecouple::decoupling {

namespace {

// Trace over the leading factor of dimension `outer`, leaving a block of size m.
Matrix trace_leading(const Matrix& x, int outer, int m) {
  Matrix y = Matrix::Zero(m, m);
  for (int a = 0; a < outer; ++a) y += x.block(a * m, a * m, m, m);
  return y;
}

Matrix conjugate_a(const Matrix& x, const Matrix& u, int dim_e) {
  const Matrix ue = tensor(u, identity(dim_e));
  return ue * x * ue.adjoint();
}

void check_input(const Matrix& x, const DecouplingSplit& split) {
  const int d = split.dim_a() * split.dim_e;
  if (x.rows() != d || x.cols() != d)
    throw Error(ErrorKind::DimensionMismatch,
                "operator is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                    " but the split needs " + std::to_string(d));
}

struct MeanStd {
  double mean = 0.0;
  double std_error = 0.0;
};

MeanStd summarize(const std::vector<double>& values) {
  MeanStd out;
  const std::size_t n = values.size();
  if (n == 0) return out;
  out.mean = pairwise_sum(values) / static_cast<double>(n);
  if (n > 1) {
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = (values[i] - out.mean) * (values[i] - out.mean);
    const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
    out.std_error = std::sqrt(var / static_cast<double>(n));
  }
  return out;
}

double sample_error(const Matrix& rho, const Matrix& target, const DecouplingSplit& split,
                    const Matrix& u) {
  const Matrix out = trace_leading(conjugate_a(rho, u, split.dim_e), split.dim_a1,
                                   split.dim_c * split.dim_e);
  const Matrix diff = out - target;
  return 0.5 * trace_norm_hermitian(0.5 * (diff + diff.adjoint()));
}

Matrix decoupled_target(const Matrix& rho, const DecouplingSplit& split) {
  const Matrix rho_e = trace_leading(rho, split.dim_a(), split.dim_e);
  return tensor(identity(split.dim_c) / static_cast<double>(split.dim_c), rho_e);
}

}  // namespace

DecouplingSplit DecouplingSplit::from_remainder(int dim_a, int dim_c, int dim_e) {
  if (dim_a < 1 || dim_c < 1 || dim_e < 1)
    throw Error(ErrorKind::BadShape, "dimensions must be positive");
  if (dim_a % dim_c != 0)
    throw Error(ErrorKind::BadShape,
                "|C| = " + std::to_string(dim_c) + " does not divide |A| = " + std::to_string(dim_a));
  return DecouplingSplit{dim_a / dim_c, dim_c, dim_e};
}

SystemShape DecouplingSplit::shape() const {
  return SystemShape({{"A1", dim_a1}, {"C", dim_c}, {"E", dim_e}});
}

DensityOperator apply_decoupling(const DensityOperator& rho_ae, const DecouplingSplit& split,
                                 const UnitaryOperator& u) {
  check_input(rho_ae.matrix(), split);
  if (u.dim() != split.dim_a())
    throw Error(ErrorKind::DimensionMismatch, "unitary does not act on A");
  Matrix out = trace_leading(conjugate_a(rho_ae.matrix(), u.matrix(), split.dim_e), split.dim_a1,
                             split.dim_c * split.dim_e);
  return DensityOperator(std::move(out), SystemShape({{"C", split.dim_c}, {"E", split.dim_e}}));
}

double decoupling_error(const DensityOperator& rho_ae, const DecouplingSplit& split,
                        const UnitaryOperator& u) {
  check_input(rho_ae.matrix(), split);
  if (u.dim() != split.dim_a())
    throw Error(ErrorKind::DimensionMismatch, "unitary does not act on A");
  if (split.dim_c == 1) return 0.0;
  return sample_error(rho_ae.matrix(), decoupled_target(rho_ae.matrix(), split), split,
                      u.matrix());
}

DeltaEstimate delta_estimate(const DensityOperator& rho_ae, const DecouplingSplit& split,
                             std::size_t samples, std::uint64_t seed, unsigned threads) {
  check_input(rho_ae.matrix(), split);
  if (samples < 2) throw Error(ErrorKind::InvalidParams, "need at least two samples");
  DeltaEstimate est;
  est.samples = samples;
  est.seed = seed;
  est.split = split;
  // Tracing all of A is unitarily invariant, so every sample vanishes.
  if (split.dim_c == 1) return est;

  const Matrix& rho = rho_ae.matrix();
  const Matrix target = decoupled_target(rho, split);
  std::vector<double> values(samples);
  parallel_for(samples, threads, [&](std::size_t i) {
    RngStream stream(seed, i);
    const UnitaryOperator u = sample_haar_unitary(split.dim_a(), stream);
    values[i] = sample_error(rho, target, split, u.matrix());
  });
  const MeanStd s = summarize(values);
  est.mean = s.mean;
  est.std_error = s.std_error;
  return est;
}

std::vector<int> divisors(int n) {
  std::vector<int> out;
  for (int k = 1; k <= n; ++k)
    if (n % k == 0) out.push_back(k);
  return out;
}

EllEstimate empirical_ell(const DensityOperator& rho_ae, int dim_a, int dim_e, double eps,
                          std::size_t samples, std::uint64_t seed, double confidence_k,
                          unsigned threads) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::OutOfRange, "eps must lie in (0, 1)");
  EllEstimate out;
  // The trace distance never exceeds 1, so every |C| qualifies.
  const bool trivial = eps >= 1.0 - 1e-9;
  for (int dc : divisors(dim_a)) {
    const auto split = DecouplingSplit::from_remainder(dim_a, dc, dim_e);
    const DeltaEstimate est = delta_estimate(rho_ae, split, samples, seed, threads);
    out.table.push_back(est);
    if (trivial || est.mean + confidence_k * est.std_error <= eps) out.ell_conservative = dc;
    if (trivial || est.mean - confidence_k * est.std_error <= eps) out.ell_optimistic = dc;
  }
  return out;
}

double haar_alpha(const DecouplingSplit& split) {
  const double a = split.dim_a();
  return (a * split.dim_a1 - split.dim_c) / (a * a - 1.0);
}

double haar_beta(const DecouplingSplit& split) {
  const double a = split.dim_a();
  return (a * split.dim_c - split.dim_a1) / (a * a - 1.0);
}

Matrix haar_average_exact(const Matrix& sigma_ae, const DecouplingSplit& split) {
  check_input(sigma_ae, split);
  if (split.dim_a() < 2) throw Error(ErrorKind::BadShape, "|A| must be at least 2");
  const Matrix sigma_e = trace_leading(sigma_ae, split.dim_a(), split.dim_e);
  return haar_alpha(split) * tensor(identity(split.dim_a()), sigma_e) +
         haar_beta(split) * sigma_ae;
}

Matrix haar_average_mc(const Matrix& sigma_ae, const DecouplingSplit& split, std::size_t samples,
                       std::uint64_t seed, unsigned threads) {
  check_input(sigma_ae, split);
  if (samples < 100) throw Error(ErrorKind::InvalidParams, "need at least 100 samples");
  constexpr std::size_t kChunk = 64;
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  const int m = split.dim_c * split.dim_e;
  const int d = split.dim_a() * split.dim_e;
  std::vector<Matrix> partial(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    Matrix acc = Matrix::Zero(d, d);
    const std::size_t end = std::min(samples, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      RngStream stream(seed, i);
      const Matrix u = sample_haar_unitary(split.dim_a(), stream).matrix();
      const Matrix reduced = trace_leading(conjugate_a(sigma_ae, u, split.dim_e), split.dim_a1, m);
      const Matrix lifted = tensor(identity(split.dim_a1), reduced);
      const Matrix ue = tensor(u, identity(split.dim_e));
      acc += ue.adjoint() * lifted * ue;
    }
    partial[c] = std::move(acc);
  });
  return pairwise_sum(partial) / static_cast<double>(samples);
}

RandomizingStatistic randomizing_statistic(const Matrix& x_ae, const DecouplingSplit& split,
                                           std::size_t samples, std::uint64_t seed) {
  check_input(x_ae, split);
  if (samples == 0) throw Error(ErrorKind::InvalidParams, "need at least one sample");
  const Matrix x_e = trace_leading(x_ae, split.dim_a(), split.dim_e);
  const Matrix target =
      tensor(identity(split.dim_c) / static_cast<double>(split.dim_c), x_e);
  std::vector<double> values(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    RngStream stream(seed, i);
    const Matrix u = sample_haar_unitary(split.dim_a(), stream).matrix();
    const Matrix out = trace_leading(conjugate_a(x_ae, u, split.dim_e), split.dim_a1,
                                     split.dim_c * split.dim_e);
    values[i] = (out - target).norm();
  }
  const MeanStd s = summarize(values);
  RandomizingStatistic stat;
  stat.mean = s.mean;
  stat.std_error = s.std_error;
  stat.bound = x_ae.norm() / std::sqrt(static_cast<double>(split.dim_a1));
  return stat;
}

}  // namespace qdecouple::decoupling
