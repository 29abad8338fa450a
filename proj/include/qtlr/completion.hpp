#ifndef QTLR_COMPLETION_HPP
#define QTLR_COMPLETION_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "qtlr/error.hpp"
#include "qtlr/mask.hpp"
#include "qtlr/qsvd.hpp"
#include "qtlr/quaternion_tensor.hpp"

namespace qtlr {

// P_Omega(T) where `keep_observed`, P_{Omega^c}(T) otherwise.
template <typename Scalar>
QuaternionTensor<Scalar> project(const QuaternionTensor<Scalar>& t, const MaskTensor& mask, bool keep_observed = true) {
  if (t.dims() != mask.dims) throw ShapeError("project: tensor and mask dims differ");
  QuaternionTensor<Scalar> out(t.dims());
  for (int c = 0; c < 4; ++c) {
    if (keep_observed)
      out.plane(c) = mask.observed.select(t.plane(c).array(), Scalar(0)).matrix();
    else
      out.plane(c) = mask.observed.select(Scalar(0), t.plane(c).array()).matrix();
  }
  return out;
}

// Weighted nuclear norm shrinkage parameters: epsilon > 0, C >= 0.
template <typename Scalar>
struct WnnParams {
  Scalar epsilon = Scalar(1e-3);
  Scalar C = Scalar(1);
};

// Which matrix the shrinkage acts on. kAsDefined shrinks the singular values
// of T{k,l} itself. kTransposed shrinks those of T{k,l}^T: for quaternion
// data the two spectra differ, and the circular-unfolding rank bound r_k r_1
// holds for the transpose (see right_rank), not for T{k,l}.
enum class UnfoldingOrientation { kAsDefined, kTransposed };

template <typename Scalar>
struct CompletionProblem {
  QuaternionTensor<Scalar> X;  // unobserved entries are ignored
  MaskTensor omega;
  std::vector<Scalar> alpha;  // (alpha_2, ..., alpha_N), sums to 1
  WnnParams<Scalar> wnn;
  std::vector<Scalar> mu0;  // (mu_2, ..., mu_N)
  Scalar mu_max = Scalar(1e6);
  Scalar rho = Scalar(1.03);
  Scalar tol = Scalar(1e-5);
  int max_iters = 300;
  UnfoldingOrientation orientation = UnfoldingOrientation::kAsDefined;

  void validate() const {
    const std::size_t n = X.order();
    if (n < 2) throw ArgumentError("completion needs a tensor of order >= 2");
    if (omega.dims != X.dims())
      throw ShapeError("mask dims " + dims_to_string(omega.dims) + " differ from tensor dims " + dims_to_string(X.dims()));
    if (alpha.size() != n - 1) throw ArgumentError("alpha needs N-1 = " + std::to_string(n - 1) + " weights");
    if (mu0.size() != n - 1) throw ArgumentError("mu0 needs N-1 = " + std::to_string(n - 1) + " values");
    Scalar sum = 0;
    for (Scalar a : alpha) {
      if (!(a > 0)) throw ArgumentError("alpha weights must be positive");
      sum += a;
    }
    if (std::abs(sum - 1) > Scalar(1e-12)) throw ArgumentError("alpha weights must sum to 1");
    for (Scalar m : mu0)
      if (!(m > 0)) throw ArgumentError("initial penalties must be positive");
    if (!(wnn.epsilon > 0)) throw ArgumentError("wnn epsilon must be positive");
    if (!(wnn.C >= 0)) throw ArgumentError("wnn C must be non-negative");
    if (!(rho > 1)) throw ArgumentError("rho must exceed 1");
    if (!(mu_max > 0)) throw ArgumentError("mu_max must be positive");
    if (!(tol >= 0)) throw ArgumentError("tol must be non-negative");
    if (max_iters < 1) throw ArgumentError("max_iters must be at least 1");
  }
};

// ADMM variables. M[j], Y[j] and mu[j] belong to k = j + 2.
template <typename Scalar>
struct SolverState {
  QuaternionTensor<Scalar> T;
  std::vector<QuaternionTensor<Scalar>> M;
  std::vector<QuaternionTensor<Scalar>> Y;
  std::vector<Scalar> mu;
  int iter = 0;
  // Singular values kept by the latest prox for each k.
  std::vector<Index> retained;
};

template <typename Scalar>
struct IterationRecord {
  int iter;
  Scalar relative_change;
  std::vector<Index> retained;
};

template <typename Scalar>
struct CompletionResult {
  QuaternionTensor<Scalar> T;
  int iterations = 0;
  bool converged = false;
  std::vector<IterationRecord<Scalar>> history;
};

// alpha_k = w_k / sum w with w_k = min(I_1...I_{k-1}, I_k...I_N), k = 2..N.
inline std::vector<double> default_alpha(const Dims& dims) {
  if (dims.size() < 2) throw ArgumentError("default_alpha: order must be at least 2");
  std::vector<double> w;
  double sum = 0;
  for (std::size_t k = 1; k < dims.size(); ++k) {
    const double head = static_cast<double>(product(dims, 0, k));
    const double tail = static_cast<double>(product(dims, k));
    w.push_back(std::min(head, tail));
    sum += w.back();
  }
  for (double& v : w) v /= sum;
  return w;
}

// Reference penalty profile for a ninth-order tensor (eight unfoldings).
inline const std::vector<double>& reference_mu_profile() {
  static const std::vector<double> profile{0.5, 0.5, 0.001, std::pow(10.0, -4.1), std::pow(10.0, -4.1), 0.001, 0.5, 0.5};
  return profile;
}

// Initial penalties for N-1 unfoldings: the reference profile resampled
// linearly in log10 over the normalized unfolding position. Balanced
// unfoldings in the middle get the smallest penalties.
inline std::vector<double> default_mu(std::size_t order) {
  if (order < 2) throw ArgumentError("default_mu: order must be at least 2");
  const auto& ref = reference_mu_profile();
  const std::size_t count = order - 1;
  if (count == ref.size()) return ref;
  std::vector<double> mu(count);
  const double last = static_cast<double>(ref.size() - 1);
  for (std::size_t j = 0; j < count; ++j) {
    const double pos = count == 1 ? last / 2 : last * static_cast<double>(j) / static_cast<double>(count - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, ref.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    const double lg = (1 - frac) * std::log10(ref[lo]) + frac * std::log10(ref[hi]);
    mu[j] = std::pow(10.0, lg);
  }
  return mu;
}

// Closed-form weighted nuclear norm shrinkage of one singular value:
// 0 if c2 < 0, else (c1 + sqrt(c2)) / 2 with c1 = sigma - eps and
// c2 = (sigma + eps)^2 - 4 C. The root is negative when sigma < eps and
// C >= sigma eps; it is clamped to 0 there.
template <typename Scalar>
Scalar wnn_shrink(Scalar sigma, Scalar epsilon, Scalar c_eff) {
  if (c_eff == Scalar(0)) return sigma;
  const Scalar c1 = sigma - epsilon;
  const Scalar c2 = (sigma + epsilon) * (sigma + epsilon) - 4 * c_eff;
  if (c2 < 0) return Scalar(0);
  return std::max(Scalar(0), (c1 + std::sqrt(c2)) / 2);
}

template <typename Scalar>
struct ProxResult {
  QuaternionMatrix<Scalar> value;
  Index retained;  // nonzero shrunk singular values
};

template <typename Scalar>
ProxResult<Scalar> wnn_prox_detailed(const QuaternionMatrix<Scalar>& gamma, Scalar epsilon, Scalar c_eff) {
  if (!(epsilon > 0)) throw ArgumentError("wnn_prox: epsilon must be positive");
  if (!(c_eff >= 0)) throw ArgumentError("wnn_prox: C must be non-negative");
  // Every singular value maps to itself.
  if (c_eff == Scalar(0)) return {gamma, std::min(gamma.rows(), gamma.cols())};
  const auto f = qsvd(gamma);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> shrunk(f.s());
  Index kept = 0;
  for (Index i = 0; i < f.s(); ++i) {
    shrunk(i) = wnn_shrink(f.sigma(i), epsilon, c_eff);
    if (shrunk(i) > 0) kept = i + 1;
  }
  if (kept == 0) return {QuaternionMatrix<Scalar>::Zero(gamma.rows(), gamma.cols()), 0};
  auto u = scale_columns(f.U.leftCols(kept), shrunk.head(kept));
  return {left_mul(u, f.V.leftCols(kept).adjoint()), kept};
}

// U diag(shrink(sigma)) V^H for the QSVD of gamma.
template <typename Scalar>
QuaternionMatrix<Scalar> wnn_prox(const QuaternionMatrix<Scalar>& gamma, Scalar epsilon, Scalar c_eff) {
  return wnn_prox_detailed(gamma, epsilon, c_eff).value;
}

// M(k) = fold_{k,l}(prox(Gamma)) with Gamma = (T + Y(k)/mu_k){k,l},
// l = N - k + 1 and C_eff = C alpha_k / mu_k. Returns the retained count.
template <typename Scalar>
Index update_M(SolverState<Scalar>& state, const CompletionProblem<Scalar>& problem, Index k) {
  const Index order = static_cast<Index>(state.T.order());
  if (k < 2 || k > order) throw ArgumentError("update_M: k out of range 2..N");
  const std::size_t j = static_cast<std::size_t>(k - 2);
  const Index l = order - k + 1;
  const Scalar mu = state.mu[j];
  const Scalar c_eff = problem.wnn.C * problem.alpha[j] / mu;
  const auto gamma = circular_unfolding(state.T + state.Y[j] / mu, k, l);
  if (problem.orientation == UnfoldingOrientation::kTransposed) {
    auto prox = wnn_prox_detailed(gamma.transpose(), problem.wnn.epsilon, c_eff);
    state.M[j] = fold_circular(prox.value.transpose(), k, l, state.T.dims());
    return prox.retained;
  }
  auto prox = wnn_prox_detailed(gamma, problem.wnn.epsilon, c_eff);
  state.M[j] = fold_circular(prox.value, k, l, state.T.dims());
  return prox.retained;
}

// T = P_{Omega^c}(mean_k (M(k) - Y(k)/mu_k)) + P_Omega(X)
template <typename Scalar>
void update_T(SolverState<Scalar>& state, const CompletionProblem<Scalar>& problem) {
  const std::size_t count = state.M.size();
  QuaternionTensor<Scalar> avg(state.T.dims());
  for (std::size_t j = 0; j < count; ++j) {
    avg += state.M[j];
    avg -= state.Y[j] / state.mu[j];
  }
  avg /= static_cast<Scalar>(count);
  for (int c = 0; c < 4; ++c)
    state.T.plane(c) = problem.omega.observed.select(problem.X.plane(c).array(), avg.plane(c).array()).matrix();
}

// Y(k) += mu_k (T - M(k))
template <typename Scalar>
void update_Y(SolverState<Scalar>& state, Index k) {
  const std::size_t j = static_cast<std::size_t>(k - 2);
  state.Y[j] += (state.T - state.M[j]) * state.mu[j];
}

// mu_k = min(mu_max, rho mu_k)
template <typename Scalar>
void update_mu(SolverState<Scalar>& state, const CompletionProblem<Scalar>& problem, Index k) {
  const std::size_t j = static_cast<std::size_t>(k - 2);
  state.mu[j] = std::min(problem.mu_max, problem.rho * state.mu[j]);
}

// T = P_Omega(X) (zero elsewhere), M(k) = T, Y(k) = 0, mu = mu0.
template <typename Scalar>
SolverState<Scalar> initial_state(const CompletionProblem<Scalar>& problem) {
  SolverState<Scalar> s;
  s.T = project(problem.X, problem.omega);
  const std::size_t count = problem.X.order() - 1;
  s.M.assign(count, s.T);
  s.Y.assign(count, QuaternionTensor<Scalar>(problem.X.dims()));
  s.mu = problem.mu0;
  s.retained.assign(count, 0);
  return s;
}

// One ADMM sweep; returns ||T_prev - T|| / ||T||.
template <typename Scalar>
Scalar admm_step(SolverState<Scalar>& state, const CompletionProblem<Scalar>& problem) {
  const Index order = static_cast<Index>(state.T.order());
  const QuaternionTensor<Scalar> previous = state.T;
  for (Index k = 2; k <= order; ++k) state.retained[k - 2] = update_M(state, problem, k);
  update_T(state, problem);
  for (Index k = 2; k <= order; ++k) {
    update_Y(state, k);
    update_mu(state, problem, k);
  }
  ++state.iter;
  const Scalar diff = (previous - state.T).norm();
  const Scalar norm = state.T.norm();
  if (norm == Scalar(0)) return diff == Scalar(0) ? Scalar(0) : std::numeric_limits<Scalar>::infinity();
  return diff / norm;
}

template <typename Scalar>
using IterationObserver = std::function<void(const SolverState<Scalar>&, const IterationRecord<Scalar>&)>;

// ADMM loop until the relative change of T drops below tol or max_iters.
template <typename Scalar>
CompletionResult<Scalar> solve(const CompletionProblem<Scalar>& problem,
                               const std::type_identity_t<IterationObserver<Scalar>>& observer = {}) {
  problem.validate();
  auto state = initial_state(problem);
  CompletionResult<Scalar> result;
  for (int it = 0; it < problem.max_iters; ++it) {
    const Scalar change = admm_step(state, problem);
    if (!std::isfinite(change))
      throw NumericalError("completion: non-finite relative change at iteration " + std::to_string(state.iter));
    result.history.push_back({state.iter, change, state.retained});
    if (observer) observer(state, result.history.back());
    if (change < problem.tol) {
      result.converged = true;
      break;
    }
  }
  result.iterations = state.iter;
  result.T = std::move(state.T);
  return result;
}

// iter,relative_change,retained_k2,...,retained_kN
template <typename Scalar>
void write_history_csv(std::ostream& os, const std::vector<IterationRecord<Scalar>>& history) {
  os << "iter,relative_change";
  const std::size_t count = history.empty() ? 0 : history.front().retained.size();
  for (std::size_t j = 0; j < count; ++j) os << ",retained_k" << j + 2;
  os << '\n';
  for (const auto& rec : history) {
    os << rec.iter << ',' << rec.relative_change;
    for (Index r : rec.retained) os << ',' << r;
    os << '\n';
  }
}

}  // namespace qtlr

#endif  // QTLR_COMPLETION_HPP
