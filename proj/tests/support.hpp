#ifndef QTLR_TESTS_SUPPORT_HPP
#define QTLR_TESTS_SUPPORT_HPP

#include <Eigen/Dense>

#include <complex>
#include <random>
#include <vector>

#include "qtlr/qtlr.hpp"

namespace testsupport {

using qtlr::Index;
using Q = qtlr::Quaterniond;
using QMat = qtlr::QuaternionMatrixd;
using QTen = qtlr::QuaternionTensord;

inline Q random_q(std::mt19937_64& rng) {
  std::normal_distribution<double> d(0, 1);
  return {d(rng), d(rng), d(rng), d(rng)};
}

// Entrywise sum-of-products oracle for A ._L B or A ._R B.
inline QMat brute_product(const QMat& a, const QMat& b, bool right) {
  QMat out(a.rows(), b.cols());
  for (Index m = 0; m < a.rows(); ++m)
    for (Index p = 0; p < b.cols(); ++p) {
      Q s;
      for (Index n = 0; n < a.cols(); ++n) s += right ? b(n, p) * a(m, n) : a(m, n) * b(n, p);
      out.set(m, p, s);
    }
  return out;
}

// Complex adjoint [[A1, A2], [-conj(A2), conj(A1)]] with A = A1 + A2 j.
inline Eigen::MatrixXcd complex_adjoint(const QMat& a) {
  using C = std::complex<double>;
  const Index m = a.rows(), n = a.cols();
  Eigen::MatrixXcd chi(2 * m, 2 * n);
  for (Index r = 0; r < m; ++r)
    for (Index c = 0; c < n; ++c) {
      const Q q = a(r, c);
      const C a1(q.w, q.x), a2(q.y, q.z);
      chi(r, c) = a1;
      chi(r, n + c) = a2;
      chi(m + r, c) = -std::conj(a2);
      chi(m + r, n + c) = std::conj(a1);
    }
  return chi;
}

// Singular values of A from its complex adjoint: each appears twice there.
inline Eigen::VectorXd adjoint_singular_values(const QMat& a) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(complex_adjoint(a));
  const Eigen::VectorXd s2 = svd.singularValues();
  Eigen::VectorXd s(std::min(a.rows(), a.cols()));
  for (Index i = 0; i < s.size(); ++i) s(i) = s2(2 * i);
  return s;
}

inline double orthonormality_defect(const QMat& u) {
  const QMat g = qtlr::left_mul(u.adjoint(), u);
  return qtlr::max_abs_diff(g, QMat::Identity(u.cols()));
}

// Rank of the complex adjoint halved: an independent rank oracle.
inline Index adjoint_rank(const QMat& a, double rel_tol = 1e-9) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(complex_adjoint(a));
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0) return 0;
  return (s.array() > rel_tol * s(0)).count() / 2;
}

// Calls fn(idx) for every one-based multi-index of dims, first index fastest.
template <typename Fn>
void for_each_index(const qtlr::Dims& dims, Fn&& fn) {
  std::vector<Index> idx(dims.size(), 1);
  const Index total = qtlr::product(dims);
  for (Index t = 0; t < total; ++t) {
    fn(idx);
    for (std::size_t n = 0; n < dims.size(); ++n) {
      if (++idx[n] <= dims[n]) break;
      idx[n] = 1;
    }
  }
}

}  // namespace testsupport

#endif  // QTLR_TESTS_SUPPORT_HPP
