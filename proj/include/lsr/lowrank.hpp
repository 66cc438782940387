#pragma once

#include "types.hpp"

namespace lsr {

/// Shape of the cascaded Hankel lifting of an N x J row: each coil becomes a
/// G x B Hankel block with B = filter_len and G = N - B + 1, and the blocks are
/// placed side by side.
struct HankelConfig
{
  Index n = 0;
  Index coils = 1;
  Index filter_len = 16;
  double eps0 = 1e-2;     // relative to the largest Gram eigenvalue of the initial iterate
  double eps_decay = 0.9; // per iteration
  double eps_min = 1e-9;  // relative floor

  auto pencil() const -> Index { return n - filter_len + 1; }
  auto width() const -> Index { return filter_len * coils; }
  auto with_dims(Index pe, Index j) const -> HankelConfig;
  void validate() const;

  // IRLS epsilon for iteration k >= 1, given the largest eigenvalue of the
  // initial Gram matrix.
  auto epsilon(double lambda_max, int k) const -> double;
};

/// (H^H H + eps I)^(-1/2), the product Q Q^H of the IRLS null-space weights.
class WeightMatrix
{
public:
  WeightMatrix(CxMatrix w, double spectral_norm);
  static auto identity(Index size) -> WeightMatrix;

  auto matrix() const -> CxMatrix const & { return w_; }
  auto size() const -> Index { return w_.rows(); }
  auto spectral_norm() const -> double { return norm_; }

private:
  CxMatrix w_;
  double norm_ = 0.0;
};

auto hankel_lift(HybridRow const &e, HankelConfig const &cfg) -> CxMatrix;

/// Exact adjoint of hankel_lift: sums each antidiagonal of every coil block.
auto hankel_adjoint(CxMatrix const &h, HankelConfig const &cfg) -> HybridRow;

/// hankel_lift(e) * q computed as a sum of per-coil valid-mode convolutions.
auto toeplitz_apply(CxVector const &q, HybridRow const &e, HankelConfig const &cfg) -> CxVector;

/// The cascaded Toeplitz matrix T(q) (G x N*J) with T(q) * vec(e) == hankel_lift(e) * q,
/// where vec stacks the coil columns of e.
auto toeplitz_matrix(CxVector const &q, HankelConfig const &cfg) -> CxMatrix;

auto gram(HybridRow const &e, HankelConfig const &cfg) -> CxMatrix;

/// Largest eigenvalue of a Hermitian PSD matrix.
auto max_eigenvalue(CxMatrix const &a) -> double;

/// Hermitian eigendecomposition with eigenvalues mapped through (lambda + eps)^(-1/2);
/// negative round-off eigenvalues are clamped to zero first.
auto weight_update(CxMatrix const &a, double eps) -> WeightMatrix;

/// Gradient of 0.5 * ||H(e) Q||_F^2, i.e. hankel_adjoint(hankel_lift(e) * W).
auto lowrank_grad(HybridRow const &e, WeightMatrix const &w, HankelConfig const &cfg) -> HybridRow;

/// ||H(e) Q||_F^2 = trace(W * gram(e)).
auto lowrank_penalty(HybridRow const &e, WeightMatrix const &w, HankelConfig const &cfg) -> double;
auto weighted_trace(WeightMatrix const &w, CxMatrix const &a) -> double;

} // namespace lsr
