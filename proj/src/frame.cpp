#include "lsr/frame.hpp"

#include <fmt/format.h>

#include <cmath>

namespace lsr {

auto frame_forward(CxMatrix const &x, int levels) -> FrameCoeffs
{
  Index const n = x.rows();
  if (levels < 1) {
    throw Error("frame needs at least one level");
  }
  if (levels >= 62 || n < (Index{1} << levels)) {
    throw Error(fmt::format("{} frame levels is too many for length {}", levels, n));
  }
  FrameCoeffs c;
  c.high.reserve(static_cast<std::size_t>(levels));
  CxMatrix low = x;
  for (int l = 0; l < levels; l++) {
    Index const d = Index{1} << l;
    CxMatrix nextLow(n, x.cols());
    CxMatrix high(n, x.cols());
    for (Index i = 0; i < n; i++) {
      Index const k = (i + d) % n;
      nextLow.row(i) = 0.5 * (low.row(i) + low.row(k));
      high.row(i) = 0.5 * (low.row(i) - low.row(k));
    }
    c.high.push_back(std::move(high));
    low = std::move(nextLow);
  }
  c.low = std::move(low);
  return c;
}

auto frame_adjoint(FrameCoeffs const &c) -> CxMatrix
{
  if (c.high.empty()) {
    throw Error("frame coefficients have no levels");
  }
  Index const n = c.low.rows();
  Index const cols = c.low.cols();
  for (auto const &h : c.high) {
    if (h.rows() != n || h.cols() != cols) {
      throw Error("frame bands have inconsistent shapes");
    }
  }
  CxMatrix low = c.low;
  for (int l = c.levels() - 1; l >= 0; l--) {
    Index const d = Index{1} << l;
    CxMatrix const &high = c.high[static_cast<std::size_t>(l)];
    CxMatrix prev = CxMatrix::Zero(n, cols);
    for (Index i = 0; i < n; i++) {
      Index const k = (i + d) % n;
      prev.row(i) += 0.5 * (low.row(i) + high.row(i));
      prev.row(k) += 0.5 * (low.row(i) - high.row(i));
    }
    low = std::move(prev);
  }
  return low;
}

auto soft_threshold(Cx x, double rho) -> Cx
{
  if (!(rho >= 0.0)) {
    throw Error("soft threshold needs rho >= 0");
  }
  double const mag = std::abs(x);
  if (mag <= rho) {
    return Cx{0.0, 0.0};
  }
  return x * ((mag - rho) / mag);
}

void soft_threshold_inplace(CxMatrix &x, double rho)
{
  if (!(rho >= 0.0)) {
    throw Error("soft threshold needs rho >= 0");
  }
  for (Index k = 0; k < x.size(); k++) {
    Cx &v = x.data()[k];
    double const mag = std::abs(v);
    v = mag <= rho ? Cx{0.0, 0.0} : v * ((mag - rho) / mag);
  }
}

auto soft_threshold(FrameCoeffs c, double rho, bool include_low) -> FrameCoeffs
{
  for (auto &h : c.high) {
    soft_threshold_inplace(h, rho);
  }
  if (include_low) {
    soft_threshold_inplace(c.low, rho);
  }
  return c;
}

auto l1_norm(FrameCoeffs const &c, bool include_low) -> double
{
  double s = 0.0;
  for (auto const &h : c.high) {
    s += h.cwiseAbs().sum();
  }
  if (include_low) {
    s += c.low.cwiseAbs().sum();
  }
  return s;
}

auto dot(FrameCoeffs const &a, FrameCoeffs const &b) -> Cx
{
  if (a.levels() != b.levels()) {
    throw Error("frame coefficient level mismatch");
  }
  Cx s = (a.low.array().conjugate() * b.low.array()).sum();
  for (std::size_t l = 0; l < a.high.size(); l++) {
    s += (a.high[l].array().conjugate() * b.high[l].array()).sum();
  }
  return s;
}

} // namespace lsr
