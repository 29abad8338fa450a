#ifndef QTLR_QUATERNION_MATRIX_HPP
#define QTLR_QUATERNION_MATRIX_HPP

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <utility>

#include "qtlr/error.hpp"
#include "qtlr/quaternion.hpp"

namespace qtlr {

using Index = Eigen::Index;

// Dense quaternion matrix stored as four real column-major component planes
// (w, x, y, z). Component planes let every quaternion product run through
// Eigen's real GEMM kernels.
template <typename Scalar>
class QuaternionMatrix {
 public:
  using Plane = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Element = Quaternion<Scalar>;

  QuaternionMatrix() = default;

  QuaternionMatrix(Index rows, Index cols) {
    for (auto& p : planes_) p = Plane::Zero(rows, cols);
  }

  QuaternionMatrix(Plane w, Plane x, Plane y, Plane z)
      : planes_{std::move(w), std::move(x), std::move(y), std::move(z)} {
    for (const auto& p : planes_) {
      if (p.rows() != planes_[0].rows() || p.cols() != planes_[0].cols())
        throw ShapeError("component planes of a quaternion matrix must share one shape");
    }
  }

  static QuaternionMatrix Zero(Index rows, Index cols) { return QuaternionMatrix(rows, cols); }

  static QuaternionMatrix Identity(Index n) {
    QuaternionMatrix m(n, n);
    m.planes_[0].setIdentity();
    return m;
  }

  // Real-valued matrix embedded as a quaternion matrix.
  static QuaternionMatrix FromReal(const Plane& real) {
    return QuaternionMatrix(real, Plane::Zero(real.rows(), real.cols()),
                            Plane::Zero(real.rows(), real.cols()),
                            Plane::Zero(real.rows(), real.cols()));
  }

  // Entries with i.i.d. standard normal components.
  template <typename Rng>
  static QuaternionMatrix Random(Index rows, Index cols, Rng& rng) {
    std::normal_distribution<Scalar> dist(0, 1);
    QuaternionMatrix m(rows, cols);
    for (auto& p : m.planes_)
      for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) p(r, c) = dist(rng);
    return m;
  }

  Index rows() const { return planes_[0].rows(); }
  Index cols() const { return planes_[0].cols(); }
  Index size() const { return planes_[0].size(); }

  Element operator()(Index r, Index c) const {
    return {planes_[0](r, c), planes_[1](r, c), planes_[2](r, c), planes_[3](r, c)};
  }

  void set(Index r, Index c, const Element& q) {
    planes_[0](r, c) = q.w;
    planes_[1](r, c) = q.x;
    planes_[2](r, c) = q.y;
    planes_[3](r, c) = q.z;
  }

  const Plane& plane(int component) const { return planes_[component]; }
  Plane& plane(int component) { return planes_[component]; }
  const std::array<Plane, 4>& planes() const { return planes_; }
  std::array<Plane, 4>& planes() { return planes_; }

  const Plane& w() const { return planes_[0]; }
  const Plane& x() const { return planes_[1]; }
  const Plane& y() const { return planes_[2]; }
  const Plane& z() const { return planes_[3]; }

  QuaternionMatrix conjugate() const {
    return QuaternionMatrix(planes_[0], -planes_[1], -planes_[2], -planes_[3]);
  }

  QuaternionMatrix transpose() const {
    return QuaternionMatrix(planes_[0].transpose(), planes_[1].transpose(),
                            planes_[2].transpose(), planes_[3].transpose());
  }

  // Conjugate transpose.
  QuaternionMatrix adjoint() const {
    return QuaternionMatrix(planes_[0].transpose(), -planes_[1].transpose(),
                            -planes_[2].transpose(), -planes_[3].transpose());
  }

  QuaternionMatrix block(Index r, Index c, Index nr, Index nc) const {
    return QuaternionMatrix(planes_[0].block(r, c, nr, nc), planes_[1].block(r, c, nr, nc),
                            planes_[2].block(r, c, nr, nc), planes_[3].block(r, c, nr, nc));
  }

  QuaternionMatrix leftCols(Index n) const { return block(0, 0, rows(), n); }

  Scalar squaredNorm() const {
    Scalar s = 0;
    for (const auto& p : planes_) s += p.squaredNorm();
    return s;
  }

  // Frobenius norm.
  Scalar norm() const {
    using std::sqrt;
    return sqrt(squaredNorm());
  }

  bool isZero() const {
    for (const auto& p : planes_)
      if (!p.isZero(0)) return false;
    return true;
  }

  QuaternionMatrix& operator+=(const QuaternionMatrix& o) {
    check_same_shape(o, "operator+=");
    for (int c = 0; c < 4; ++c) planes_[c] += o.planes_[c];
    return *this;
  }
  QuaternionMatrix& operator-=(const QuaternionMatrix& o) {
    check_same_shape(o, "operator-=");
    for (int c = 0; c < 4; ++c) planes_[c] -= o.planes_[c];
    return *this;
  }
  QuaternionMatrix& operator*=(Scalar s) {
    for (auto& p : planes_) p *= s;
    return *this;
  }

  friend QuaternionMatrix operator+(QuaternionMatrix a, const QuaternionMatrix& b) { return a += b; }
  friend QuaternionMatrix operator-(QuaternionMatrix a, const QuaternionMatrix& b) { return a -= b; }
  friend QuaternionMatrix operator*(QuaternionMatrix a, Scalar s) { return a *= s; }
  friend QuaternionMatrix operator*(Scalar s, QuaternionMatrix a) { return a *= s; }

 private:
  void check_same_shape(const QuaternionMatrix& o, const char* op) const {
    if (o.rows() != rows() || o.cols() != cols())
      throw ShapeError(std::string(op) + ": shapes differ");
  }

  std::array<Plane, 4> planes_;
};

using QuaternionMatrixd = QuaternionMatrix<double>;

namespace internal {

// Hamilton product expanded over component planes. `op` is the real bilinear
// product applied to planes (matrix product or elementwise product). With
// `reversed` set, the result is sum b*a instead of a*b: only the sign of the
// cross terms changes because real components commute.
template <typename Plane, typename Op>
std::array<Plane, 4> hamilton_planes(const std::array<Plane, 4>& a, const std::array<Plane, 4>& b,
                                     Op op, bool reversed) {
  const auto& [aw, ax, ay, az] = a;
  const auto& [bw, bx, by, bz] = b;
  std::array<Plane, 4> out;
  out[0] = op(aw, bw) - op(ax, bx) - op(ay, by) - op(az, bz);
  Plane cx = op(ay, bz) - op(az, by);
  Plane cy = op(az, bx) - op(ax, bz);
  Plane cz = op(ax, by) - op(ay, bx);
  if (reversed) {
    cx = -cx;
    cy = -cy;
    cz = -cz;
  }
  out[1] = op(aw, bx) + op(ax, bw) + cx;
  out[2] = op(aw, by) + op(ay, bw) + cy;
  out[3] = op(aw, bz) + op(az, bw) + cz;
  return out;
}

template <typename Scalar>
QuaternionMatrix<Scalar> matrix_product(const QuaternionMatrix<Scalar>& a,
                                        const QuaternionMatrix<Scalar>& b, bool reversed,
                                        const char* name) {
  using Plane = typename QuaternionMatrix<Scalar>::Plane;
  if (a.cols() != b.rows())
    throw ShapeError(std::string(name) + ": inner dimensions differ (" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + ")");
  auto gemm = [](const Plane& p, const Plane& q) -> Plane { return p * q; };
  auto out = hamilton_planes(a.planes(), b.planes(), gemm, reversed);
  return QuaternionMatrix<Scalar>(std::move(out[0]), std::move(out[1]), std::move(out[2]),
                                  std::move(out[3]));
}

}  // namespace internal

// (A ._L B)_mp = sum_n a_mn b_np
template <typename Scalar>
QuaternionMatrix<Scalar> left_mul(const QuaternionMatrix<Scalar>& a,
                                  const QuaternionMatrix<Scalar>& b) {
  return internal::matrix_product(a, b, false, "left_mul");
}

// (A ._R B)_mp = sum_n b_np a_mn
template <typename Scalar>
QuaternionMatrix<Scalar> right_mul(const QuaternionMatrix<Scalar>& a,
                                   const QuaternionMatrix<Scalar>& b) {
  return internal::matrix_product(a, b, true, "right_mul");
}

// Entrywise Hamilton product a(i,j) * b(i,j).
template <typename Scalar>
QuaternionMatrix<Scalar> cwise_mul(const QuaternionMatrix<Scalar>& a,
                                   const QuaternionMatrix<Scalar>& b) {
  using Plane = typename QuaternionMatrix<Scalar>::Plane;
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("cwise_mul: shapes differ");
  auto had = [](const Plane& p, const Plane& q) -> Plane { return p.cwiseProduct(q); };
  auto out = internal::hamilton_planes(a.planes(), b.planes(), had, false);
  return QuaternionMatrix<Scalar>(std::move(out[0]), std::move(out[1]), std::move(out[2]),
                                  std::move(out[3]));
}

// A ._L diag(d): column j scaled by the real d(j).
template <typename Scalar, typename Derived>
QuaternionMatrix<Scalar> scale_columns(QuaternionMatrix<Scalar> a,
                                       const Eigen::MatrixBase<Derived>& d) {
  if (d.size() != a.cols()) throw ShapeError("scale_columns: length mismatch");
  for (auto& p : a.planes()) p = p * d.asDiagonal();
  return a;
}

// diag(d) ._L A: row i scaled by the real d(i).
template <typename Scalar, typename Derived>
QuaternionMatrix<Scalar> scale_rows(QuaternionMatrix<Scalar> a,
                                    const Eigen::MatrixBase<Derived>& d) {
  if (d.size() != a.rows()) throw ShapeError("scale_rows: length mismatch");
  for (auto& p : a.planes()) p = d.asDiagonal() * p;
  return a;
}

// Largest componentwise absolute difference; shapes must agree.
template <typename Scalar>
Scalar max_abs_diff(const QuaternionMatrix<Scalar>& a, const QuaternionMatrix<Scalar>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("max_abs_diff: shapes differ");
  Scalar m = 0;
  for (int c = 0; c < 4; ++c) {
    if (a.size() == 0) break;
    m = std::max(m, (a.plane(c) - b.plane(c)).cwiseAbs().maxCoeff());
  }
  return m;
}

}  // namespace qtlr

#endif  // QTLR_QUATERNION_MATRIX_HPP
