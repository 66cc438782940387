#include "lsr/lowrank.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace lsr {

auto HankelConfig::with_dims(Index pe, Index j) const -> HankelConfig
{
  HankelConfig c = *this;
  c.n = pe;
  c.coils = j;
  return c;
}

void HankelConfig::validate() const
{
  if (coils < 1) {
    throw Error("Hankel config needs at least one coil");
  }
  if (filter_len < 1 || filter_len >= n) {
    throw Error(fmt::format("filter length {} must lie in [1, {})", filter_len, n));
  }
  if (2 * filter_len > n + 1) {
    throw Error(fmt::format("filter length {} exceeds (n + 1) / 2 for n = {}", filter_len, n));
  }
  if (!(eps0 > 0.0) || !(eps_decay > 0.0) || eps_decay > 1.0 || !(eps_min > 0.0) || eps_min > eps0) {
    throw Error("IRLS epsilon schedule needs eps0 > 0, 0 < decay <= 1, 0 < eps_min <= eps0");
  }
}

auto HankelConfig::epsilon(double lambda_max, int k) const -> double
{
  double const scale = lambda_max > 0.0 ? lambda_max : 1.0;
  return std::max(eps0 * scale * std::pow(eps_decay, k), eps_min * scale);
}

WeightMatrix::WeightMatrix(CxMatrix w, double spectral_norm)
  : w_{std::move(w)}
  , norm_{spectral_norm}
{
}

auto WeightMatrix::identity(Index size) -> WeightMatrix { return WeightMatrix(CxMatrix::Identity(size, size), 1.0); }

namespace {

void check_row(HybridRow const &e, HankelConfig const &cfg)
{
  if (e.pe() != cfg.n || e.coils() != cfg.coils) {
    throw Error(fmt::format("row is {}x{}, Hankel config expects {}x{}", e.pe(), e.coils(), cfg.n, cfg.coils));
  }
}

} // namespace

auto hankel_lift(HybridRow const &e, HankelConfig const &cfg) -> CxMatrix
{
  check_row(e, cfg);
  Index const g = cfg.pencil();
  Index const b = cfg.filter_len;
  CxMatrix h(g, cfg.width());
  for (Index j = 0; j < cfg.coils; j++) {
    for (Index q = 0; q < b; q++) {
      h.col(j * b + q) = e.data.col(j).segment(q, g);
    }
  }
  return h;
}

auto hankel_adjoint(CxMatrix const &h, HankelConfig const &cfg) -> HybridRow
{
  Index const g = cfg.pencil();
  Index const b = cfg.filter_len;
  if (h.rows() != g || h.cols() != cfg.width()) {
    throw Error(fmt::format("Hankel matrix is {}x{}, expected {}x{}", h.rows(), h.cols(), g, cfg.width()));
  }
  HybridRow out(cfg.n, cfg.coils);
  for (Index j = 0; j < cfg.coils; j++) {
    for (Index q = 0; q < b; q++) {
      out.data.col(j).segment(q, g) += h.col(j * b + q);
    }
  }
  return out;
}

auto toeplitz_apply(CxVector const &q, HybridRow const &e, HankelConfig const &cfg) -> CxVector
{
  check_row(e, cfg);
  if (q.size() != cfg.width()) {
    throw Error(fmt::format("filter has length {}, expected {}", q.size(), cfg.width()));
  }
  Index const g = cfg.pencil();
  Index const b = cfg.filter_len;
  CxVector out = CxVector::Zero(g);
  for (Index j = 0; j < cfg.coils; j++) {
    for (Index p = 0; p < g; p++) {
      Cx acc{0.0, 0.0};
      for (Index k = 0; k < b; k++) {
        acc += e.data(p + k, j) * q(j * b + k);
      }
      out(p) += acc;
    }
  }
  return out;
}

auto toeplitz_matrix(CxVector const &q, HankelConfig const &cfg) -> CxMatrix
{
  if (q.size() != cfg.width()) {
    throw Error(fmt::format("filter has length {}, expected {}", q.size(), cfg.width()));
  }
  Index const g = cfg.pencil();
  Index const b = cfg.filter_len;
  CxMatrix t = CxMatrix::Zero(g, cfg.n * cfg.coils);
  for (Index j = 0; j < cfg.coils; j++) {
    for (Index p = 0; p < g; p++) {
      for (Index k = 0; k < b; k++) {
        t(p, j * cfg.n + p + k) = q(j * b + k);
      }
    }
  }
  return t;
}

auto gram(HybridRow const &e, HankelConfig const &cfg) -> CxMatrix
{
  CxMatrix const h = hankel_lift(e, cfg);
  CxMatrix a = h.adjoint() * h;
  return a;
}

auto max_eigenvalue(CxMatrix const &a) -> double
{
  if (a.size() == 0) {
    return 0.0;
  }
  Eigen::SelfAdjointEigenSolver<CxMatrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

auto weight_update(CxMatrix const &a, double eps) -> WeightMatrix
{
  if (a.rows() != a.cols()) {
    throw Error("weight update needs a square matrix");
  }
  if (!(eps > 0.0)) {
    throw Error("weight update needs eps > 0");
  }
  double const scale = std::max(a.norm(), 1.0e-300);
  if ((a - a.adjoint()).norm() > 1e-8 * scale) {
    throw Error("weight update input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CxMatrix> es(a);
  if (es.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigendecomposition failed");
  }
  Eigen::VectorXd const lam = es.eigenvalues().cwiseMax(0.0);
  Eigen::VectorXd const f = (lam.array() + eps).rsqrt().matrix();
  CxMatrix const &v = es.eigenvectors();
  CxMatrix w = v * f.asDiagonal() * v.adjoint();
  w = (0.5 * (w + w.adjoint())).eval();
  // eigenvalues are ascending, so the smallest one gives the largest weight
  return WeightMatrix(std::move(w), f.size() > 0 ? f(0) : 0.0);
}

auto lowrank_grad(HybridRow const &e, WeightMatrix const &w, HankelConfig const &cfg) -> HybridRow
{
  if (w.size() != cfg.width()) {
    throw Error(fmt::format("weight matrix is {0}x{0}, expected {1}x{1}", w.size(), cfg.width()));
  }
  CxMatrix const hw = hankel_lift(e, cfg) * w.matrix();
  HybridRow out = hankel_adjoint(hw, cfg);
  out.row_index = e.row_index;
  return out;
}

auto lowrank_penalty(HybridRow const &e, WeightMatrix const &w, HankelConfig const &cfg) -> double
{
  if (w.size() != cfg.width()) {
    throw Error(fmt::format("weight matrix is {0}x{0}, expected {1}x{1}", w.size(), cfg.width()));
  }
  return weighted_trace(w, gram(e, cfg));
}

auto weighted_trace(WeightMatrix const &w, CxMatrix const &a) -> double
{
  if (a.rows() != w.size() || a.cols() != w.size()) {
    throw Error("Gram and weight matrices differ in size");
  }
  // trace(W A) without forming the product
  Cx const t = (w.matrix().array() * a.transpose().array()).sum();
  return std::max(t.real(), 0.0);
}

} // namespace lsr
