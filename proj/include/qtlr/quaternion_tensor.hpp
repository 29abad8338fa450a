#ifndef QTLR_QUATERNION_TENSOR_HPP
#define QTLR_QUATERNION_TENSOR_HPP

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qtlr/error.hpp"
#include "qtlr/quaternion.hpp"
#include "qtlr/quaternion_matrix.hpp"

namespace qtlr {

using Dims = std::vector<Index>;

inline Index product(const Dims& dims, std::size_t begin = 0, std::size_t end = std::size_t(-1)) {
  end = std::min(end, dims.size());
  Index p = 1;
  for (std::size_t i = begin; i < end; ++i) p *= dims[i];
  return p;
}

inline std::string dims_to_string(const Dims& dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims[i]);
  }
  return s + "]";
}

// One-based multi-index i1 + (i2-1) I1 + ... + (iN-1) I1...I_{N-1}.
inline Index multi_index(const std::vector<Index>& indices, const Dims& dims) {
  if (indices.size() != dims.size())
    throw ArgumentError("multi_index: " + std::to_string(indices.size()) + " indices for order " +
                        std::to_string(dims.size()));
  Index linear = 0;
  Index stride = 1;
  for (std::size_t n = 0; n < dims.size(); ++n) {
    if (indices[n] < 1 || indices[n] > dims[n])
      throw BoundsError("multi_index: index " + std::to_string(indices[n]) + " out of range 1.." +
                        std::to_string(dims[n]) + " in mode " + std::to_string(n + 1));
    linear += (indices[n] - 1) * stride;
    stride *= dims[n];
  }
  return linear + 1;
}

// Dense order-N quaternion tensor. Entries are stored as four real component
// vectors in column-major order (first index fastest), so the linear position
// of a zero-based multi-index equals its multi-index value minus one.
template <typename Scalar>
class QuaternionTensor {
 public:
  using Plane = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Element = Quaternion<Scalar>;

  QuaternionTensor() = default;

  explicit QuaternionTensor(Dims dims) : dims_(std::move(dims)) {
    validate_dims(dims_);
    for (auto& p : planes_) p = Plane::Zero(product(dims_));
  }

  QuaternionTensor(Dims dims, std::array<Plane, 4> planes)
      : dims_(std::move(dims)), planes_(std::move(planes)) {
    validate_dims(dims_);
    for (const auto& p : planes_)
      if (p.size() != product(dims_))
        throw ShapeError("tensor planes hold " + std::to_string(p.size()) + " entries, dims " +
                         dims_to_string(dims_) + " need " + std::to_string(product(dims_)));
  }

  static QuaternionTensor Zero(const Dims& dims) { return QuaternionTensor(dims); }

  static QuaternionTensor Constant(const Dims& dims, const Element& q) {
    QuaternionTensor t(dims);
    t.planes_[0].setConstant(q.w);
    t.planes_[1].setConstant(q.x);
    t.planes_[2].setConstant(q.y);
    t.planes_[3].setConstant(q.z);
    return t;
  }

  template <typename Rng>
  static QuaternionTensor Random(const Dims& dims, Rng& rng) {
    std::normal_distribution<Scalar> dist(0, 1);
    QuaternionTensor t(dims);
    for (auto& p : t.planes_)
      for (Index i = 0; i < p.size(); ++i) p(i) = dist(rng);
    return t;
  }

  // Column-major reshape of a matrix.
  static QuaternionTensor FromMatrix(const QuaternionMatrix<Scalar>& m, const Dims& dims) {
    if (product(dims) != m.size())
      throw ShapeError("cannot reshape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                       " matrix to dims " + dims_to_string(dims));
    std::array<Plane, 4> planes;
    for (int c = 0; c < 4; ++c) planes[c] = Eigen::Map<const Plane>(m.plane(c).data(), m.size());
    return QuaternionTensor(dims, std::move(planes));
  }

  const Dims& dims() const { return dims_; }
  Index dim(std::size_t n) const { return dims_[n]; }
  std::size_t order() const { return dims_.size(); }
  Index size() const { return planes_[0].size(); }

  Element operator[](Index linear) const {
    return {planes_[0](linear), planes_[1](linear), planes_[2](linear), planes_[3](linear)};
  }
  void set(Index linear, const Element& q) {
    planes_[0](linear) = q.w;
    planes_[1](linear) = q.x;
    planes_[2](linear) = q.y;
    planes_[3](linear) = q.z;
  }

  // One-based multi-index access.
  Element at(const std::vector<Index>& indices) const { return (*this)[multi_index(indices, dims_) - 1]; }
  void set_at(const std::vector<Index>& indices, const Element& q) { set(multi_index(indices, dims_) - 1, q); }

  const Plane& plane(int c) const { return planes_[c]; }
  Plane& plane(int c) { return planes_[c]; }
  const std::array<Plane, 4>& planes() const { return planes_; }

  // Column-major reshape (metadata only; entries keep their linear order).
  QuaternionTensor reshape(const Dims& dims) const {
    if (product(dims) != size())
      throw ShapeError("reshape: " + dims_to_string(dims_) + " -> " + dims_to_string(dims) +
                       " changes the entry count");
    return QuaternionTensor(dims, planes_);
  }

  // Column-major view as a rows x cols matrix (copy).
  QuaternionMatrix<Scalar> as_matrix(Index rows, Index cols) const {
    if (rows * cols != size()) throw ShapeError("as_matrix: entry count mismatch");
    using MPlane = typename QuaternionMatrix<Scalar>::Plane;
    std::array<MPlane, 4> mp;
    for (int c = 0; c < 4; ++c) mp[c] = Eigen::Map<const MPlane>(planes_[c].data(), rows, cols);
    return QuaternionMatrix<Scalar>(std::move(mp[0]), std::move(mp[1]), std::move(mp[2]), std::move(mp[3]));
  }

  Scalar squaredNorm() const {
    Scalar s = 0;
    for (const auto& p : planes_) s += p.squaredNorm();
    return s;
  }
  Scalar norm() const { return std::sqrt(squaredNorm()); }

  QuaternionTensor& operator+=(const QuaternionTensor& o) {
    check_same_dims(o, "operator+=");
    for (int c = 0; c < 4; ++c) planes_[c] += o.planes_[c];
    return *this;
  }
  QuaternionTensor& operator-=(const QuaternionTensor& o) {
    check_same_dims(o, "operator-=");
    for (int c = 0; c < 4; ++c) planes_[c] -= o.planes_[c];
    return *this;
  }
  QuaternionTensor& operator*=(Scalar s) {
    for (auto& p : planes_) p *= s;
    return *this;
  }
  QuaternionTensor& operator/=(Scalar s) {
    for (auto& p : planes_) p /= s;
    return *this;
  }

  friend QuaternionTensor operator+(QuaternionTensor a, const QuaternionTensor& b) { return a += b; }
  friend QuaternionTensor operator-(QuaternionTensor a, const QuaternionTensor& b) { return a -= b; }
  friend QuaternionTensor operator*(QuaternionTensor a, Scalar s) { return a *= s; }
  friend QuaternionTensor operator*(Scalar s, QuaternionTensor a) { return a *= s; }
  friend QuaternionTensor operator/(QuaternionTensor a, Scalar s) { return a /= s; }

  friend bool operator==(const QuaternionTensor& a, const QuaternionTensor& b) {
    return a.dims_ == b.dims_ && a.planes_ == b.planes_;
  }

 private:
  static void validate_dims(const Dims& dims) {
    if (dims.empty()) throw ShapeError("tensor order must be at least 1");
    for (Index d : dims)
      if (d < 1) throw ShapeError("tensor dims must be positive, got " + dims_to_string(dims));
  }

  void check_same_dims(const QuaternionTensor& o, const char* op) const {
    if (o.dims_ != dims_)
      throw ShapeError(std::string(op) + ": dims " + dims_to_string(dims_) + " vs " + dims_to_string(o.dims_));
  }

  Dims dims_;
  std::array<Plane, 4> planes_;
};

using QuaternionTensord = QuaternionTensor<double>;

namespace internal {

// Visits every entry of a tensor with dims `dims` in storage order, handing
// the callback the source linear position and the (row, col) cell given by
// column-major multi-indices over `row_modes` and `col_modes` (zero-based
// mode numbers, each mode appearing in exactly one list).
template <typename Fn>
void for_each_cell(const Dims& dims, const std::vector<std::size_t>& row_modes,
                   const std::vector<std::size_t>& col_modes, Fn&& fn) {
  const std::size_t order = dims.size();
  // Per-mode contribution to (row, col) of a unit step.
  std::vector<Index> row_stride(order, 0), col_stride(order, 0);
  Index s = 1;
  for (std::size_t m : row_modes) {
    row_stride[m] = s;
    s *= dims[m];
  }
  s = 1;
  for (std::size_t m : col_modes) {
    col_stride[m] = s;
    s *= dims[m];
  }
  std::vector<Index> idx(order, 0);
  Index row = 0, col = 0;
  const Index total = product(dims);
  for (Index linear = 0; linear < total; ++linear) {
    fn(linear, row, col);
    for (std::size_t n = 0; n < order; ++n) {
      if (++idx[n] < dims[n]) {
        row += row_stride[n];
        col += col_stride[n];
        break;
      }
      row -= row_stride[n] * (dims[n] - 1);
      col -= col_stride[n] * (dims[n] - 1);
      idx[n] = 0;
    }
  }
}

inline void check_modes(const Dims& dims, const std::vector<std::size_t>& row_modes,
                        const std::vector<std::size_t>& col_modes) {
  std::vector<int> seen(dims.size(), 0);
  for (auto m : row_modes) ++seen.at(m);
  for (auto m : col_modes) ++seen.at(m);
  for (int c : seen)
    if (c != 1) throw ArgumentError("matricize: every mode must appear exactly once");
}

inline Index mode_product(const Dims& dims, const std::vector<std::size_t>& modes) {
  Index p = 1;
  for (auto m : modes) p *= dims[m];
  return p;
}

}  // namespace internal

// General matricization: rows enumerate `row_modes`, columns `col_modes`,
// each as a column-major multi-index in the listed order.
template <typename Scalar>
QuaternionMatrix<Scalar> matricize(const QuaternionTensor<Scalar>& t, const std::vector<std::size_t>& row_modes,
                                   const std::vector<std::size_t>& col_modes) {
  internal::check_modes(t.dims(), row_modes, col_modes);
  QuaternionMatrix<Scalar> m(internal::mode_product(t.dims(), row_modes),
                             internal::mode_product(t.dims(), col_modes));
  std::array<Scalar*, 4> dst{m.plane(0).data(), m.plane(1).data(), m.plane(2).data(), m.plane(3).data()};
  std::array<const Scalar*, 4> src{t.plane(0).data(), t.plane(1).data(), t.plane(2).data(), t.plane(3).data()};
  const Index ld = m.rows();
  internal::for_each_cell(t.dims(), row_modes, col_modes, [&](Index linear, Index r, Index c) {
    for (int k = 0; k < 4; ++k) dst[k][r + c * ld] = src[k][linear];
  });
  return m;
}

// Inverse of matricize for a tensor of dims `dims`.
template <typename Scalar>
QuaternionTensor<Scalar> tensorize(const QuaternionMatrix<Scalar>& m, const Dims& dims,
                                   const std::vector<std::size_t>& row_modes,
                                   const std::vector<std::size_t>& col_modes) {
  internal::check_modes(dims, row_modes, col_modes);
  if (m.rows() != internal::mode_product(dims, row_modes) || m.cols() != internal::mode_product(dims, col_modes))
    throw ShapeError("fold: " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                     " matrix does not match dims " + dims_to_string(dims));
  QuaternionTensor<Scalar> t(dims);
  std::array<Scalar*, 4> dst{t.plane(0).data(), t.plane(1).data(), t.plane(2).data(), t.plane(3).data()};
  std::array<const Scalar*, 4> src{m.plane(0).data(), m.plane(1).data(), m.plane(2).data(), m.plane(3).data()};
  const Index ld = m.rows();
  internal::for_each_cell(dims, row_modes, col_modes, [&](Index linear, Index r, Index c) {
    for (int k = 0; k < 4; ++k) dst[k][linear] = src[k][r + c * ld];
  });
  return t;
}

namespace internal {

inline void check_mode(std::size_t order, Index k, Index lo, Index hi, const char* what) {
  if (k < lo || k > hi)
    throw ArgumentError(std::string(what) + ": mode " + std::to_string(k) + " outside " + std::to_string(lo) +
                        ".." + std::to_string(hi) + " for order " + std::to_string(order));
}

// Zero-based modes (start, start+1, ..., start+count-1) taken modulo N.
inline std::vector<std::size_t> cyclic_modes(std::size_t order, std::size_t start, std::size_t count) {
  std::vector<std::size_t> modes(count);
  for (std::size_t i = 0; i < count; ++i) modes[i] = (start + i) % order;
  return modes;
}

inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> k_unfolding_modes(std::size_t order, Index k) {
  check_mode(order, k, 1, static_cast<Index>(order) - 1, "k_unfolding");
  return {cyclic_modes(order, 0, k), cyclic_modes(order, k, order - k)};
}

inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> mode_k_modes(std::size_t order, Index k) {
  check_mode(order, k, 1, static_cast<Index>(order), "mode_k_unfolding");
  return {{std::size_t(k - 1)}, cyclic_modes(order, k, order - 1)};
}

inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> classical_modes(std::size_t order, Index k) {
  check_mode(order, k, 1, static_cast<Index>(order), "classical_mode_k_unfolding");
  std::vector<std::size_t> cols;
  for (std::size_t n = 0; n < order; ++n)
    if (n != std::size_t(k - 1)) cols.push_back(n);
  return {{std::size_t(k - 1)}, cols};
}

inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> circular_modes(std::size_t order, Index k,
                                                                                    Index l) {
  check_mode(order, k, 1, static_cast<Index>(order), "circular_unfolding");
  check_mode(order, l, 1, static_cast<Index>(order) - 1, "circular_unfolding (l)");
  return {cyclic_modes(order, k - 1, l), cyclic_modes(order, k - 1 + l, order - l)};
}

}  // namespace internal

// T<k>: rows over (i1..ik), columns over (i_{k+1}..iN); 1 <= k < N.
template <typename Scalar>
QuaternionMatrix<Scalar> k_unfolding(const QuaternionTensor<Scalar>& t, Index k) {
  auto [rows, cols] = internal::k_unfolding_modes(t.order(), k);
  return matricize(t, rows, cols);
}

template <typename Scalar>
QuaternionTensor<Scalar> k_fold(const QuaternionMatrix<Scalar>& m, Index k, const Dims& dims) {
  auto [rows, cols] = internal::k_unfolding_modes(dims.size(), k);
  return tensorize(m, dims, rows, cols);
}

// T[k]: rows i_k, columns over (i_{k+1}..iN, i1..i_{k-1}).
template <typename Scalar>
QuaternionMatrix<Scalar> mode_k_unfolding(const QuaternionTensor<Scalar>& t, Index k) {
  auto [rows, cols] = internal::mode_k_modes(t.order(), k);
  return matricize(t, rows, cols);
}

template <typename Scalar>
QuaternionTensor<Scalar> mode_k_fold(const QuaternionMatrix<Scalar>& m, Index k, const Dims& dims) {
  auto [rows, cols] = internal::mode_k_modes(dims.size(), k);
  return tensorize(m, dims, rows, cols);
}

// T(k): rows i_k, columns over (i1..i_{k-1}, i_{k+1}..iN).
template <typename Scalar>
QuaternionMatrix<Scalar> classical_mode_k_unfolding(const QuaternionTensor<Scalar>& t, Index k) {
  auto [rows, cols] = internal::classical_modes(t.order(), k);
  return matricize(t, rows, cols);
}

template <typename Scalar>
QuaternionTensor<Scalar> classical_mode_k_fold(const QuaternionMatrix<Scalar>& m, Index k, const Dims& dims) {
  auto [rows, cols] = internal::classical_modes(dims.size(), k);
  return tensorize(m, dims, rows, cols);
}

// T{k,l}: rows over the l modes k, k+1, ..., columns over the remaining
// modes k+l, ..., k-1, all positions taken cyclically modulo N.
template <typename Scalar>
QuaternionMatrix<Scalar> circular_unfolding(const QuaternionTensor<Scalar>& t, Index k, Index l) {
  auto [rows, cols] = internal::circular_modes(t.order(), k, l);
  return matricize(t, rows, cols);
}

template <typename Scalar>
QuaternionTensor<Scalar> fold_circular(const QuaternionMatrix<Scalar>& m, Index k, Index l, const Dims& dims) {
  auto [rows, cols] = internal::circular_modes(dims.size(), k, l);
  return tensorize(m, dims, rows, cols);
}

// MATLAB-style permute with a zero-based order: out.dims[i] = in.dims[perm[i]].
template <typename Scalar>
QuaternionTensor<Scalar> permute(const QuaternionTensor<Scalar>& t, const std::vector<std::size_t>& perm) {
  if (perm.size() != t.order()) throw ArgumentError("permute: order mismatch");
  Dims out_dims(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out_dims[i] = t.dims().at(perm[i]);
  // Output position is a column-major multi-index over modes in `perm` order.
  auto m = matricize(t, perm, {});
  return QuaternionTensor<Scalar>::FromMatrix(m, out_dims);
}

// T^{P_n}(i_n, ..., i_N, i_1, ..., i_{n-1}) = T(i_1, ..., i_N); 1 <= n <= N.
template <typename Scalar>
QuaternionTensor<Scalar> permute_cyclic(const QuaternionTensor<Scalar>& t, Index n) {
  internal::check_mode(t.order(), n, 1, static_cast<Index>(t.order()), "permute_cyclic");
  return permute(t, internal::cyclic_modes(t.order(), n - 1, t.order()));
}

// <X, Y> = sum conj(x) y
template <typename Scalar>
Quaternion<Scalar> inner_product(const QuaternionTensor<Scalar>& a, const QuaternionTensor<Scalar>& b) {
  if (a.dims() != b.dims())
    throw ShapeError("inner_product: dims " + dims_to_string(a.dims()) + " vs " + dims_to_string(b.dims()));
  const auto& [aw, ax, ay, az] = a.planes();
  const auto& [bw, bx, by, bz] = b.planes();
  return {aw.dot(bw) + ax.dot(bx) + ay.dot(by) + az.dot(bz),
          aw.dot(bx) - ax.dot(bw) - ay.dot(bz) + az.dot(by),
          aw.dot(by) - ay.dot(bw) - az.dot(bx) + ax.dot(bz),
          aw.dot(bz) - az.dot(bw) - ax.dot(by) + ay.dot(bx)};
}

template <typename Scalar>
Scalar frobenius_norm(const QuaternionTensor<Scalar>& t) {
  return t.norm();
}

template <typename Scalar>
Scalar max_abs_diff(const QuaternionTensor<Scalar>& a, const QuaternionTensor<Scalar>& b) {
  if (a.dims() != b.dims()) throw ShapeError("max_abs_diff: dims differ");
  Scalar m = 0;
  for (int c = 0; c < 4; ++c) m = std::max(m, (a.plane(c) - b.plane(c)).cwiseAbs().maxCoeff());
  return m;
}

// Largest |x|, |y|, |z| over all entries.
template <typename Scalar>
Scalar max_imaginary_magnitude(const QuaternionTensor<Scalar>& t) {
  Scalar m = 0;
  for (int c = 1; c < 4; ++c) m = std::max(m, t.plane(c).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace qtlr

#endif  // QTLR_QUATERNION_TENSOR_HPP
