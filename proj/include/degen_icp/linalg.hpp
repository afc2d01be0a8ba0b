#ifndef DEGEN_ICP_LINALG_HPP
#define DEGEN_ICP_LINALG_HPP

#include <degen_icp/types.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <numeric>

namespace degen_icp {

/// Symmetric eigendecomposition with eigenvalues in descending order.
/// vectors.col(k) pairs with values(k).
template <int N>
struct SymmetricEigen {
  Eigen::Matrix<double, N, 1> values;
  Eigen::Matrix<double, N, N> vectors;

  Eigen::Matrix<double, N, N> reconstruct() const {
    return vectors * values.asDiagonal() * vectors.transpose();
  }
};

enum class EigenSign {
  LeadingPositive,  // first nonzero entry positive
  LargestPositive,  // largest-magnitude entry positive (first on ties)
};

namespace detail {

template <int N>
void normalize_sign(Eigen::Matrix<double, N, 1>& v, EigenSign rule) {
  int idx = 0;
  if (rule == EigenSign::LeadingPositive) {
    while (idx < N - 1 && v(idx) == 0.0) ++idx;
  } else {
    v.cwiseAbs().maxCoeff(&idx);
  }
  if (v(idx) < 0.0) v = -v;
}

template <int N>
bool lexicographically_greater(const Eigen::Matrix<double, N, 1>& a, const Eigen::Matrix<double, N, 1>& b) {
  for (int i = 0; i < N; ++i) {
    if (a(i) != b(i)) return a(i) > b(i);
  }
  return false;
}

}  // namespace detail

/// Deterministic eigendecomposition: descending eigenvalues, per-vector sign
/// fixed by `rule`, exact ties ordered by lexicographically greatest vector.
template <int N>
SymmetricEigen<N> symmetric_eigen(const Eigen::Matrix<double, N, N>& m, EigenSign rule) {
  const Eigen::Matrix<double, N, N> sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> solver(sym);

  std::array<Eigen::Matrix<double, N, 1>, N> vecs;
  std::array<int, N> order;
  for (int k = 0; k < N; ++k) {
    vecs[k] = solver.eigenvectors().col(k);
    detail::normalize_sign<N>(vecs[k], rule);
    order[k] = k;
  }
  const auto& vals = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (vals(a) != vals(b)) return vals(a) > vals(b);
    return detail::lexicographically_greater<N>(vecs[a], vecs[b]);
  });

  SymmetricEigen<N> out;
  for (int k = 0; k < N; ++k) {
    out.values(k) = vals(order[k]);
    out.vectors.col(k) = vecs[order[k]];
  }
  return out;
}

}  // namespace degen_icp

#endif  // DEGEN_ICP_LINALG_HPP
