#pragma once

#include "types.hpp"

namespace lsr {

/// Undecimated Haar frame coefficients of an N x J signal: one high band per
/// level plus the final low band, each N x J.
struct FrameCoeffs
{
  std::vector<CxMatrix> high;
  CxMatrix low;

  auto levels() const -> int { return static_cast<int>(high.size()); }
};

/// A trous analysis with circular filters [1, 1]/2 and [1, -1]/2 dilated by
/// 2^(level - 1). The adjoint is an exact left inverse.
auto frame_forward(CxMatrix const &x, int levels) -> FrameCoeffs;
auto frame_adjoint(FrameCoeffs const &c) -> CxMatrix;

auto soft_threshold(Cx x, double rho) -> Cx;
void soft_threshold_inplace(CxMatrix &x, double rho);
auto soft_threshold(FrameCoeffs c, double rho, bool include_low = true) -> FrameCoeffs;

auto l1_norm(FrameCoeffs const &c, bool include_low = true) -> double;
auto dot(FrameCoeffs const &a, FrameCoeffs const &b) -> Cx;

} // namespace lsr
