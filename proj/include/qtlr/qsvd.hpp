#ifndef QTLR_QSVD_HPP
#define QTLR_QSVD_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "qtlr/error.hpp"
#include "qtlr/quaternion_matrix.hpp"

namespace qtlr {

// Thin quaternion SVD A = U ._L diag(sigma) ._L V^H with s retained values.
template <typename Scalar>
struct QsvdFactors {
  QuaternionMatrix<Scalar> U;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sigma;
  QuaternionMatrix<Scalar> V;

  Index s() const { return sigma.size(); }

  QuaternionMatrix<Scalar> reconstruct() const {
    return left_mul(scale_columns(U, sigma), V.adjoint());
  }

  // U diag(sigma), V^H and the leading `r` triplets only.
  QsvdFactors truncated(Index r) const {
    return {U.leftCols(r), sigma.head(r), V.leftCols(r)};
  }
};

// How a threshold delta selects singular values.
enum class TruncationRule {
  // keep sigma >= delta^2 (squared threshold; can exceed the eps_p budget)
  kSigmaAtLeastDeltaSquared,
  // keep sigma >= delta
  kSigmaAtLeastDelta,
  // smallest rank whose discarded tail has Frobenius norm <= delta
  kResidualAtMostDelta,
};

namespace internal {

template <typename Scalar>
struct Columns {
  std::array<Scalar*, 4> base;
  Index ld;

  explicit Columns(QuaternionMatrix<Scalar>& m)
      : base{m.plane(0).data(), m.plane(1).data(), m.plane(2).data(), m.plane(3).data()},
        ld(m.rows()) {}

  std::array<Scalar*, 4> col(Index j) const {
    return {base[0] + j * ld, base[1] + j * ld, base[2] + j * ld, base[3] + j * ld};
  }
};

// sum_i conj(a_i) b_i
template <typename Scalar>
Quaternion<Scalar> column_dot(const std::array<Scalar*, 4>& a, const std::array<Scalar*, 4>& b,
                              Index n) {
  Scalar w = 0, x = 0, y = 0, z = 0;
  const Scalar *aw = a[0], *ax = a[1], *ay = a[2], *az = a[3];
  const Scalar *bw = b[0], *bx = b[1], *by = b[2], *bz = b[3];
  for (Index i = 0; i < n; ++i) {
    w += aw[i] * bw[i] + ax[i] * bx[i] + ay[i] * by[i] + az[i] * bz[i];
    x += aw[i] * bx[i] - ax[i] * bw[i] - ay[i] * bz[i] + az[i] * by[i];
    y += aw[i] * by[i] - ay[i] * bw[i] - az[i] * bx[i] + ax[i] * bz[i];
    z += aw[i] * bz[i] - az[i] * bw[i] - ax[i] * by[i] + ay[i] * bx[i];
  }
  return {w, x, y, z};
}

template <typename Scalar>
Scalar column_squared_norm(const std::array<Scalar*, 4>& a, Index n) {
  Scalar s = 0;
  for (int c = 0; c < 4; ++c)
    for (Index i = 0; i < n; ++i) s += a[c][i] * a[c][i];
  return s;
}

// (a, b) <- (c a - s b q, s a + c b q) with q a unit quaternion acting from
// the right. This is the column update A <- A ._L J for
// J = [[c, s], [-s q, c q]].
template <typename Scalar>
void rotate_columns(const std::array<Scalar*, 4>& a, const std::array<Scalar*, 4>& b, Index n,
                    Scalar c, Scalar s, const Quaternion<Scalar>& q) {
  Scalar *aw = a[0], *ax = a[1], *ay = a[2], *az = a[3];
  Scalar *bw = b[0], *bx = b[1], *by = b[2], *bz = b[3];
  for (Index i = 0; i < n; ++i) {
    const Scalar tw = bw[i] * q.w - bx[i] * q.x - by[i] * q.y - bz[i] * q.z;
    const Scalar tx = bw[i] * q.x + bx[i] * q.w + by[i] * q.z - bz[i] * q.y;
    const Scalar ty = bw[i] * q.y - bx[i] * q.z + by[i] * q.w + bz[i] * q.x;
    const Scalar tz = bw[i] * q.z + bx[i] * q.y - by[i] * q.x + bz[i] * q.w;
    const Scalar pw = aw[i], px = ax[i], py = ay[i], pz = az[i];
    aw[i] = c * pw - s * tw;
    ax[i] = c * px - s * tx;
    ay[i] = c * py - s * ty;
    az[i] = c * pz - s * tz;
    bw[i] = s * pw + c * tw;
    bx[i] = s * px + c * tx;
    by[i] = s * py + c * ty;
    bz[i] = s * pz + c * tz;
  }
}

// y <- y - x q
template <typename Scalar>
void subtract_scaled_column(const std::array<Scalar*, 4>& y, const std::array<Scalar*, 4>& x,
                            Index n, const Quaternion<Scalar>& q) {
  for (Index i = 0; i < n; ++i) {
    const Quaternion<Scalar> xi{x[0][i], x[1][i], x[2][i], x[3][i]};
    const Quaternion<Scalar> t = mul(xi, q);
    y[0][i] -= t.w;
    y[1][i] -= t.x;
    y[2][i] -= t.y;
    y[3][i] -= t.z;
  }
}

// Hestenes one-sided Jacobi: on return W's columns are mutually orthogonal
// and W_in = W_out ._L V^H. Requires W.rows() >= W.cols().
template <typename Scalar>
void one_sided_jacobi(QuaternionMatrix<Scalar>& w, QuaternionMatrix<Scalar>& v) {
  using std::abs;
  using std::sqrt;
  const Index m = w.rows();
  const Index n = w.cols();
  v = QuaternionMatrix<Scalar>::Identity(n);
  Columns<Scalar> wc(w);
  Columns<Scalar> vc(v);
  const Scalar tol = std::numeric_limits<Scalar>::epsilon() * static_cast<Scalar>(std::max<Index>(m, 1));
  constexpr int kMaxSweeps = 80;

  std::vector<Scalar> norms(n);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    Scalar largest = 0;
    for (Index j = 0; j < n; ++j) {
      norms[j] = column_squared_norm(wc.col(j), m);
      largest = std::max(largest, norms[j]);
    }
    // Columns this far below the largest are roundoff; rotating them only
    // drives their inner products into underflow.
    const Scalar negligible = largest * tol * tol;
    bool rotated = false;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Scalar alpha = norms[p];
        const Scalar beta = norms[q];
        if (alpha <= negligible || beta <= negligible) continue;
        const Quaternion<Scalar> gamma = column_dot(wc.col(p), wc.col(q), m);
        const Scalar scale = std::max({abs(gamma.w), abs(gamma.x), abs(gamma.y), abs(gamma.z)});
        if (scale == Scalar(0)) continue;
        const Quaternion<Scalar> unit_dir = gamma / scale;
        const Scalar dir_mod = modulus(unit_dir);
        const Scalar g = dir_mod * scale;
        if (!(g > tol * sqrt(alpha) * sqrt(beta))) continue;
        rotated = true;
        // gamma * conj(gamma)/|gamma| is real, so the rotation reduces to a
        // real 2x2 Jacobi step after the phase is applied to column q.
        const Quaternion<Scalar> phase = conj(unit_dir) / dir_mod;
        const Scalar zeta = (beta - alpha) / (2 * g);
        const Scalar t = (zeta >= 0 ? Scalar(1) : Scalar(-1)) / (abs(zeta) + sqrt(1 + zeta * zeta));
        const Scalar c = 1 / sqrt(1 + t * t);
        const Scalar s = c * t;
        rotate_columns(wc.col(p), wc.col(q), m, c, s, phase);
        rotate_columns(vc.col(p), vc.col(q), n, c, s, phase);
        norms[p] = alpha - t * g;
        norms[q] = beta + t * g;
      }
    }
    if (!rotated) return;
  }
}

// Orthonormalizes the columns of `u` in order by modified Gram-Schmidt. A
// column whose residual is too small to trust (e.g. from a zero singular
// value) is replaced by the canonical basis vector e_i least covered by the
// columns so far, i.e. with the smallest row weight sum_k |u_ik|^2. Its
// residual is at least sqrt((m - j) / m).
template <typename Scalar>
void orthonormalize_columns(QuaternionMatrix<Scalar>& u, const std::vector<bool>& trusted) {
  using std::sqrt;
  const Index m = u.rows();
  const Index n = u.cols();
  Columns<Scalar> uc(u);
  std::vector<Scalar> row_weight(m, Scalar(0));

  auto project_out = [&](const std::array<Scalar*, 4>& cj, Index j) {
    for (int pass = 0; pass < 2; ++pass)
      for (Index k = 0; k < j; ++k) subtract_scaled_column(cj, uc.col(k), m, column_dot(uc.col(k), cj, m));
    return sqrt(column_squared_norm(cj, m));
  };

  for (Index j = 0; j < n; ++j) {
    auto cj = uc.col(j);
    Scalar nrm = trusted[j] ? project_out(cj, j) : Scalar(0);
    if (!(nrm > Scalar(0.5))) {
      const Index i = std::min_element(row_weight.begin(), row_weight.end()) - row_weight.begin();
      if (!(row_weight[i] < Scalar(1) - Scalar(0.5) / static_cast<Scalar>(m)))
        throw NumericalError("orthonormal completion ran out of directions");
      for (int c = 0; c < 4; ++c)
        for (Index r = 0; r < m; ++r) cj[c][r] = Scalar(0);
      cj[0][i] = Scalar(1);
      nrm = project_out(cj, j);
    }
    for (int c = 0; c < 4; ++c)
      for (Index r = 0; r < m; ++r) cj[c][r] /= nrm;
    for (Index r = 0; r < m; ++r)
      row_weight[r] += cj[0][r] * cj[0][r] + cj[1][r] * cj[1][r] + cj[2][r] * cj[2][r] + cj[3][r] * cj[3][r];
  }
}

template <typename Scalar>
QsvdFactors<Scalar> qsvd_tall(const QuaternionMatrix<Scalar>& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  QuaternionMatrix<Scalar> w = a;
  QuaternionMatrix<Scalar> v;
  one_sided_jacobi(w, v);

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> norms(n);
  for (Index j = 0; j < n; ++j) {
    Scalar s = 0;
    for (int c = 0; c < 4; ++c) s += w.plane(c).col(j).squaredNorm();
    norms(j) = std::sqrt(s);
  }
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return norms(i) > norms(j); });

  QsvdFactors<Scalar> f{QuaternionMatrix<Scalar>(m, n), Eigen::Matrix<Scalar, Eigen::Dynamic, 1>(n),
                        QuaternionMatrix<Scalar>(n, n)};
  const Scalar smax = n > 0 ? norms(order[0]) : Scalar(0);
  const Scalar tiny = smax * std::numeric_limits<Scalar>::epsilon() * static_cast<Scalar>(std::max(m, n));
  std::vector<bool> trusted(n);
  for (Index j = 0; j < n; ++j) {
    const Index src = order[j];
    const Scalar s = norms(src);
    f.sigma(j) = s;
    trusted[j] = s > tiny && s > Scalar(0);
    for (int c = 0; c < 4; ++c) {
      f.V.plane(c).col(j) = v.plane(c).col(src);
      if (trusted[j]) f.U.plane(c).col(j) = w.plane(c).col(src) / s;
    }
  }
  orthonormalize_columns(f.U, trusted);
  return f;
}

}  // namespace internal

// Thin QSVD: s = min(M, N) singular values, non-increasing. Computed by
// one-sided Jacobi rotations in quaternion arithmetic, on A^H when A is wide.
template <typename Scalar>
QsvdFactors<Scalar> qsvd(const QuaternionMatrix<Scalar>& a) {
  if (a.rows() >= a.cols()) return internal::qsvd_tall(a);
  auto f = internal::qsvd_tall(a.adjoint());
  std::swap(f.U, f.V);
  return f;
}

// Number of singular values kept by `rule` at threshold `delta`. Never less
// than 1 for a non-empty list.
template <typename Derived>
Index truncation_rank(const Eigen::MatrixBase<Derived>& sigma, typename Derived::Scalar delta,
                      TruncationRule rule) {
  using Scalar = typename Derived::Scalar;
  const Index n = sigma.size();
  if (n == 0) return 0;
  Index keep = 0;
  switch (rule) {
    case TruncationRule::kSigmaAtLeastDeltaSquared:
    case TruncationRule::kSigmaAtLeastDelta: {
      const Scalar cut = rule == TruncationRule::kSigmaAtLeastDelta ? delta : delta * delta;
      for (Index i = 0; i < n; ++i)
        if (sigma(i) >= cut) ++keep;
      break;
    }
    case TruncationRule::kResidualAtMostDelta: {
      keep = n;
      Scalar tail = 0;
      while (keep > 0) {
        const Scalar next = tail + sigma(keep - 1) * sigma(keep - 1);
        if (std::sqrt(next) > delta) break;
        tail = next;
        --keep;
      }
      break;
    }
  }
  return std::max<Index>(keep, 1);
}

template <typename Scalar>
struct TruncatedQsvd {
  QsvdFactors<Scalar> factors;
  Index rank_delta;
};

// delta-truncated QSVD. The default rule compares singular values against
// delta^2; at least one triplet is always retained.
template <typename Scalar>
TruncatedQsvd<Scalar> truncated_qsvd(const QuaternionMatrix<Scalar>& a, Scalar delta,
                                     TruncationRule rule = TruncationRule::kSigmaAtLeastDeltaSquared) {
  if (!(delta >= 0)) throw ArgumentError("truncated_qsvd: delta must be non-negative");
  auto full = qsvd(a);
  const Index r = truncation_rank(full.sigma, delta, rule);
  return {full.truncated(r), r};
}

// Numerical rank: singular values above 1e-10 * sigma_max * max(M, N).
template <typename Scalar>
Index rank(const QuaternionMatrix<Scalar>& a) {
  if (a.size() == 0) return 0;
  const auto f = qsvd(a);
  const Scalar smax = f.sigma(0);
  if (smax == Scalar(0)) return 0;
  const Scalar tol = Scalar(1e-10) * smax * static_cast<Scalar>(std::max(a.rows(), a.cols()));
  return (f.sigma.array() > tol).count();
}

// Rank counted through right null spaces {x : A ._R x = 0}, which equals
// rank(A^T). The bound rank(A ._R B) <= min(rank A, rank B) holds for this
// notion but not for rank() itself.
template <typename Scalar>
Index right_rank(const QuaternionMatrix<Scalar>& a) {
  return rank(a.transpose());
}

}  // namespace qtlr

#endif  // QTLR_QSVD_HPP
