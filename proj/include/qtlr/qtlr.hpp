#ifndef QTLR_QTLR_HPP
#define QTLR_QTLR_HPP

#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "qtlr/error.hpp"
#include "qtlr/qsvd.hpp"
#include "qtlr/quaternion_matrix.hpp"
#include "qtlr/quaternion_tensor.hpp"

namespace qtlr {

// Ring of N third-order cores; core n has shape r_n x I_n x r_{n+1} with
// r_{N+1} = r_1.
template <typename Scalar>
class QtlrCores {
 public:
  using Core = QuaternionTensor<Scalar>;

  QtlrCores() = default;

  explicit QtlrCores(std::vector<Core> cores) : cores_(std::move(cores)) {
    if (cores_.empty()) throw ShapeError("QTLR ring needs at least one core");
    for (std::size_t n = 0; n < cores_.size(); ++n) {
      if (cores_[n].order() != 3)
        throw ShapeError("core " + std::to_string(n + 1) + " has order " + std::to_string(cores_[n].order()) +
                         ", expected 3");
      const auto& next = cores_[(n + 1) % cores_.size()];
      if (cores_[n].dim(2) != next.dim(0))
        throw ShapeError("core " + std::to_string(n + 1) + " ends with rank " + std::to_string(cores_[n].dim(2)) +
                         " but core " + std::to_string((n + 1) % cores_.size() + 1) + " starts with " +
                         std::to_string(next.dim(0)));
    }
  }

  // Cores with i.i.d. standard normal components. ranks = (r_1, ..., r_N).
  template <typename Rng>
  static QtlrCores Random(const Dims& dims, const std::vector<Index>& ranks, Rng& rng) {
    if (dims.size() != ranks.size()) throw ArgumentError("QtlrCores::Random: dims and ranks differ in length");
    std::vector<Core> cores;
    for (std::size_t n = 0; n < dims.size(); ++n)
      cores.push_back(Core::Random({ranks[n], dims[n], ranks[(n + 1) % dims.size()]}, rng));
    return QtlrCores(std::move(cores));
  }

  std::size_t order() const { return cores_.size(); }
  const Core& core(std::size_t n) const { return cores_[n]; }
  const std::vector<Core>& cores() const { return cores_; }

  // (r_1, ..., r_N)
  std::vector<Index> ranks() const {
    std::vector<Index> r;
    for (const auto& c : cores_) r.push_back(c.dim(0));
    return r;
  }

  Dims dims() const {
    Dims d;
    for (const auto& c : cores_) d.push_back(c.dim(1));
    return d;
  }

  Index parameter_count() const {
    Index p = 0;
    for (const auto& c : cores_) p += c.size();
    return p;
  }

 private:
  std::vector<Core> cores_;
};

using QtlrCoresd = QtlrCores<double>;

// Lateral slice Z(:, i, :) of an order-3 tensor, zero-based i.
template <typename Scalar>
QuaternionMatrix<Scalar> lateral_slice(const QuaternionTensor<Scalar>& z, Index i) {
  const Index r0 = z.dim(0), n = z.dim(1), r1 = z.dim(2);
  QuaternionMatrix<Scalar> m(r0, r1);
  for (int c = 0; c < 4; ++c)
    for (Index b = 0; b < r1; ++b)
      for (Index a = 0; a < r0; ++a) m.plane(c)(a, b) = z.plane(c)(a + r0 * (i + n * b));
  return m;
}

template <typename Scalar>
Quaternion<Scalar> trace(const QuaternionMatrix<Scalar>& m) {
  Quaternion<Scalar> t;
  for (Index i = 0; i < std::min(m.rows(), m.cols()); ++i) t += m(i, i);
  return t;
}

// Tr{Z_1(i_1) ._L ... ._L Z_N(i_N)} for a one-based multi-index.
template <typename Scalar>
Quaternion<Scalar> element(const QtlrCores<Scalar>& z, const std::vector<Index>& indices) {
  multi_index(indices, z.dims());  // bounds check
  QuaternionMatrix<Scalar> acc = lateral_slice(z.core(0), indices[0] - 1);
  for (std::size_t n = 1; n < z.order(); ++n) acc = left_mul(acc, lateral_slice(z.core(n), indices[n] - 1));
  return trace(acc);
}

namespace internal {

template <typename Scalar>
QuaternionTensor<Scalar> connect(const QuaternionTensor<Scalar>& a, const QuaternionTensor<Scalar>& b, bool right) {
  if (a.order() != 3 || b.order() != 3) throw ShapeError("connection product needs order-3 tensors");
  if (a.dim(2) != b.dim(0))
    throw ShapeError("connection product: rank " + std::to_string(a.dim(2)) + " does not chain to " +
                     std::to_string(b.dim(0)));
  // a<2> is (r_n I_n) x r_{n+1} and b<1> is r_{n+1} x (I_{n+1} r_{n+2}); both
  // are the storage order of the cores.
  const auto al = a.as_matrix(a.dim(0) * a.dim(1), a.dim(2));
  const auto br = b.as_matrix(b.dim(0), b.dim(1) * b.dim(2));
  const auto prod = right ? right_mul(al, br) : left_mul(al, br);
  return QuaternionTensor<Scalar>::FromMatrix(prod, {a.dim(0), a.dim(1) * b.dim(1), b.dim(2)});
}

}  // namespace internal

// Left connection product: lateral slice t = i_n + I_n i_{n+1} (zero-based)
// of the result equals Z_n(i_n) ._L Z_{n+1}(i_{n+1}).
template <typename Scalar>
QuaternionTensor<Scalar> left_connect(const QuaternionTensor<Scalar>& a, const QuaternionTensor<Scalar>& b) {
  return internal::connect(a, b, false);
}

// Right connection product; slices are Z_n(i_n) ._R Z_{n+1}(i_{n+1}).
template <typename Scalar>
QuaternionTensor<Scalar> right_connect(const QuaternionTensor<Scalar>& a, const QuaternionTensor<Scalar>& b) {
  return internal::connect(a, b, true);
}

// Z_first ._L ... ._L Z_last, zero-based inclusive core positions.
template <typename Scalar>
QuaternionTensor<Scalar> chain(const QtlrCores<Scalar>& z, std::size_t first, std::size_t last) {
  if (first > last || last >= z.order()) throw ArgumentError("chain: empty or out-of-range core run");
  QuaternionTensor<Scalar> acc = z.core(first);
  for (std::size_t n = first + 1; n <= last; ++n) acc = left_connect(acc, z.core(n));
  return acc;
}

enum class Subchain { kBefore, kUpTo, kAfter, kFrom };  // <k, <=k, >k, >=k

// Subchain tensors Z^{<k}, Z^{<=k}, Z^{>k}, Z^{>=k} with one-based k.
template <typename Scalar>
QuaternionTensor<Scalar> subchain(const QtlrCores<Scalar>& z, Subchain kind, Index k) {
  const Index n = static_cast<Index>(z.order());
  Index first = 0, last = -1;  // one-based, inclusive
  switch (kind) {
    case Subchain::kBefore: first = 1; last = k - 1; break;
    case Subchain::kUpTo: first = 1; last = k; break;
    case Subchain::kAfter: first = k + 1; last = n; break;
    case Subchain::kFrom: first = k; last = n; break;
  }
  if (first < 1 || last > n || first > last)
    throw ArgumentError("subchain: k = " + std::to_string(k) + " selects no cores of a ring of " + std::to_string(n));
  return chain(z, static_cast<std::size_t>(first - 1), static_cast<std::size_t>(last - 1));
}

// f: trace of every lateral slice of an r x M x r tensor, as a vector.
template <typename Scalar>
QuaternionTensor<Scalar> slice_traces(const QuaternionTensor<Scalar>& full, const Dims& dims) {
  const Index r = full.dim(0), m = full.dim(1);
  if (full.dim(2) != r) throw ShapeError("slice_traces: slices are not square");
  QuaternionTensor<Scalar> out(dims);
  if (out.size() != m) throw ShapeError("slice_traces: dims do not match fused mode length");
  for (int c = 0; c < 4; ++c) {
    const auto& src = full.plane(c);
    auto& dst = out.plane(c);
    for (Index a = 0; a < r; ++a)
      for (Index t = 0; t < m; ++t) dst(t) += src(a + r * (t + m * a));
  }
  return out;
}

// T = f(Z_1 ._L ... ._L Z_N). Evaluated one diagonal bond index at a time to
// avoid materializing the r_1 x prod(I) x r_1 chain.
template <typename Scalar>
QuaternionTensor<Scalar> reconstruct(const QtlrCores<Scalar>& z) {
  const Dims dims = z.dims();
  const std::size_t n = z.order();
  const Index r1 = z.core(0).dim(0);
  QuaternionTensor<Scalar> out(dims);
  for (Index a = 0; a < r1; ++a) {
    // Row a of the first core: 1 x I_1 x r_2.
    const auto& c0 = z.core(0);
    QuaternionTensor<Scalar> acc({1, c0.dim(1), c0.dim(2)});
    for (int c = 0; c < 4; ++c)
      for (Index t = 0; t < c0.dim(1) * c0.dim(2); ++t) acc.plane(c)(t) = c0.plane(c)(a + r1 * t);
    for (std::size_t k = 1; k < n; ++k) acc = left_connect(acc, z.core(k));
    // acc is 1 x prod(I) x r_1; take column a.
    const Index m = acc.dim(1);
    for (int c = 0; c < 4; ++c) out.plane(c) += acc.plane(c).segment(m * a, m);
  }
  return out;
}

// f((Z_n ._L ... ._L Z_N) ._R (Z_1 ._L ... ._L Z_{n-1})), one-based n. The
// result has the cyclically permuted dims (I_n, ..., I_N, I_1, ..., I_{n-1}).
template <typename Scalar>
QuaternionTensor<Scalar> reconstruct_permuted(const QtlrCores<Scalar>& z, Index n) {
  const Index order = static_cast<Index>(z.order());
  if (n < 1 || n > order) throw ArgumentError("reconstruct_permuted: n out of range");
  if (n == 1) return reconstruct(z);
  const Dims dims = z.dims();
  Dims out_dims;
  for (Index k = 0; k < order; ++k) out_dims.push_back(dims[(n - 1 + k) % order]);
  const auto head = chain(z, n - 1, order - 1);
  const auto tail = chain(z, 0, n - 2);
  return slice_traces(right_connect(head, tail), out_dims);
}

// Factor pair (r1, r2) of `r` minimizing |r1 - r2| with r1 <= r2.
inline std::pair<Index, Index> split_rank(Index r) {
  if (r < 1) throw ArgumentError("split_rank: rank must be positive");
  Index best = 1;
  for (Index a = 1; a * a <= r; ++a)
    if (r % a == 0) best = a;
  return {best, r / best};
}

template <typename Scalar>
struct QtlrQsvdOptions {
  // Residual truncation keeps the total error within eps_p ||T||_F.
  TruncationRule rule = TruncationRule::kResidualAtMostDelta;
};

// QTLR-QSVD: N sequential truncated QSVDs with thresholds
// delta_1 = sqrt(2) eps_p ||T|| / sqrt(N) and delta_n = eps_p ||T|| / sqrt(N).
template <typename Scalar>
QtlrCores<Scalar> qtlr_qsvd(const QuaternionTensor<Scalar>& t, Scalar eps_p, QtlrQsvdOptions<Scalar> options = {}) {
  using std::sqrt;
  if (!(eps_p > 0)) throw ArgumentError("qtlr_qsvd: eps_p must be positive");
  const std::size_t order = t.order();
  if (order < 2) throw ArgumentError("qtlr_qsvd: tensor order must be at least 2");
  const Dims& dims = t.dims();
  const Scalar norm = t.norm();
  const Scalar delta_first = sqrt(Scalar(2)) * eps_p * norm / sqrt(Scalar(order));
  const Scalar delta_rest = eps_p * norm / sqrt(Scalar(order));

  std::vector<QuaternionTensor<Scalar>> cores;
  if (norm == Scalar(0)) {
    // Rank floor of 1 everywhere, and no singular vectors worth keeping.
    for (Index d : dims) cores.push_back(QuaternionTensor<Scalar>::Zero({1, d, 1}));
    return QtlrCores<Scalar>(std::move(cores));
  }
  const Index tail_size = product(dims, 1);
  auto first = truncated_qsvd(t.as_matrix(dims[0], tail_size), delta_first, options.rule);
  const auto [r1, r2] = split_rank(first.rank_delta);
  cores.push_back(permute(QuaternionTensor<Scalar>::FromMatrix(first.factors.U, {dims[0], r1, r2}), {1, 0, 2}));
  const auto sv = scale_rows(first.factors.V.adjoint(), first.factors.sigma);
  // Z^{>1}: r_2 x (I_2 ... I_N) x r_1
  QuaternionTensor<Scalar> rest = permute(QuaternionTensor<Scalar>::FromMatrix(sv, {r1, r2, tail_size}), {1, 2, 0});

  Index rn = r2;
  for (std::size_t n = 1; n + 1 < order; ++n) {
    const Index remaining = product(dims, n + 1);
    auto step = truncated_qsvd(rest.as_matrix(rn * dims[n], remaining * r1), delta_rest, options.rule);
    const Index next = step.rank_delta;
    cores.push_back(QuaternionTensor<Scalar>::FromMatrix(step.factors.U, {rn, dims[n], next}));
    auto s = scale_rows(step.factors.V.adjoint(), step.factors.sigma);
    rest = QuaternionTensor<Scalar>::FromMatrix(s, {next, remaining, r1});
    rn = next;
  }
  cores.push_back(rest.reshape({rn, dims[order - 1], r1}));
  return QtlrCores<Scalar>(std::move(cores));
}

// ||T - reconstruct(Z)||_F / ||T||_F
template <typename Scalar>
Scalar relative_error(const QuaternionTensor<Scalar>& t, const QtlrCores<Scalar>& z) {
  if (t.dims() != z.dims())
    throw ShapeError("relative_error: tensor dims " + dims_to_string(t.dims()) + " vs cores " +
                     dims_to_string(z.dims()));
  const Scalar norm = t.norm();
  if (norm == Scalar(0)) throw DomainError("relative_error: reference tensor has zero norm");
  return (t - reconstruct(z)).norm() / norm;
}

}  // namespace qtlr

#endif  // QTLR_QTLR_HPP
