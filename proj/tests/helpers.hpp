#pragma once

#include <vector>

#include "qdecouple/qmat.hpp"

namespace qdecouple::testing {

inline Matrix diag(const std::vector<double>& v) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = v[i];
  return m;
}

inline Matrix ket_bra(const CVector& a) { return a * a.adjoint(); }

inline int uniform_int(RngStream& s, int lo, int hi) {
  return lo + static_cast<int>(s.uniform() * (hi - lo + 1));
}

/// Random probability vector, optionally with some exact zeros.
inline std::vector<double> random_prob(RngStream& s, int k, bool zeros) {
  std::vector<double> p(static_cast<std::size_t>(k));
  double total = 0.0;
  for (auto& x : p) {
    x = (zeros && s.uniform() < 0.2) ? 0.0 : s.uniform_open0();
    total += x;
  }
  if (total == 0.0) {
    p[0] = 1.0;
    return p;
  }
  for (auto& x : p) x /= total;
  return p;
}

}  // namespace qdecouple::testing
