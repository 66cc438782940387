#include "lsr/solver.hpp"

#include "lsr/fourier.hpp"
#include "lsr/frame.hpp"
#include "lsr/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <random>
#include <thread>

namespace lsr {

auto prior_from_string(std::string const &s) -> Prior
{
  if (s == "full") {
    return Prior::Full;
  }
  if (s == "lr" || s == "lowrank_only") {
    return Prior::LowRankOnly;
  }
  if (s == "sp" || s == "sparse_only") {
    return Prior::SparseOnly;
  }
  throw Error(fmt::format("unknown prior mode '{}'", s));
}

auto to_string(Prior p) -> std::string
{
  switch (p) {
  case Prior::Full: return "full";
  case Prior::LowRankOnly: return "lr";
  case Prior::SparseOnly: return "sp";
  }
  return "?";
}

void SolverConfig::validate() const
{
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) {
    throw Error("regularization weights must be non-negative");
  }
  if (gamma && !(*gamma > 0.0)) {
    throw Error("step size must be positive");
  }
  if (max_iters < 0) {
    throw Error("iteration count must be non-negative");
  }
  if (!(tol >= 0.0)) {
    throw Error("tolerance must be non-negative");
  }
  if (frame_levels < 1) {
    throw Error("frame needs at least one level");
  }
  if (refresh_every < 0) {
    throw Error("weight refresh period must be non-negative");
  }
}

namespace {

constexpr std::uint64_t kPowerSeed = 0x5eed'0d15'c0ffee11ULL;
constexpr int kPowerIters = 20;
// The step operator drifts slowly between weight refreshes.
constexpr int kWarmPowerIters = 4;

void check_row(HybridRow const &z, SamplingMask const &m)
{
  if (z.pe() != m.n()) {
    throw Error(fmt::format("row has {} PE samples, mask has {}", z.pe(), m.n()));
  }
}

// U(U e - z) for masked z.
auto data_residual(CxMatrix const &e, CxMatrix const &z, SamplingMask const &m) -> CxMatrix
{
  CxMatrix r = e;
  apply_mask_inplace(r, m);
  r -= z;
  apply_mask_inplace(r, m);
  return r;
}

auto sparse_term(CxMatrix const &e, SolverConfig const &cfg) -> double
{
  CxMatrix x = e;
  ifft_pe_inplace(x);
  return l1_norm(frame_forward(x, cfg.frame_levels), cfg.threshold_low_band);
}

auto data_term(CxMatrix const &e, CxMatrix const &z, SamplingMask const &m) -> double
{
  CxMatrix ue = e;
  apply_mask_inplace(ue, m);
  return 0.5 * (z - ue).squaredNorm();
}

auto objective_impl(HybridRow const &e, HybridRow const &z, SamplingMask const &m, WeightMatrix const *w,
                    SolverConfig const &cfg) -> double
{
  check_row(e, m);
  if (z.pe() != e.pe() || z.coils() != e.coils()) {
    throw Error("iterate and data rows differ in shape");
  }
  double f = data_term(e.data, z.data, m);
  double const lam1 = cfg.lowrank_weight();
  double const lam2 = cfg.sparse_weight();
  if (lam1 > 0.0 && w != nullptr) {
    auto const hcfg = cfg.hankel.with_dims(e.pe(), e.coils());
    f += lam1 * lowrank_penalty(e, *w, hcfg);
  }
  if (lam2 > 0.0) {
    f += lam2 * sparse_term(e.data, cfg);
  }
  return f;
}

// Power iteration on e -> U e + 2 lambda1 G_W(e) starting from v (unit norm).
// Leaves the last normalized iterate in v.
auto power_norm(SamplingMask const &m, WeightMatrix const *w, SolverConfig const &cfg, CxMatrix &v, int iters)
  -> double
{
  double const lam1 = cfg.lowrank_weight();
  auto const hcfg = cfg.hankel.with_dims(v.rows(), v.cols());
  double est = 0.0;
  for (int it = 0; it < iters; it++) {
    CxMatrix u = v;
    apply_mask_inplace(u, m);
    if (lam1 > 0.0 && w != nullptr) {
      u += (2.0 * lam1) * lowrank_grad(HybridRow(v), *w, hcfg).data;
    }
    est = u.norm();
    if (!(est > 0.0) || !std::isfinite(est)) {
      throw NumericalError("step size estimate failed");
    }
    v = u / est;
  }
  return est;
}

auto random_unit(Index rows, Index cols) -> CxMatrix
{
  std::mt19937_64 rng(kPowerSeed);
  std::normal_distribution<double> normal;
  CxMatrix v(rows, cols);
  for (Index k = 0; k < v.size(); k++) {
    v.data()[k] = Cx{normal(rng), normal(rng)};
  }
  return v / v.norm();
}

auto step_impl(HybridRow const &z, SamplingMask const &m, WeightMatrix const *w, SolverConfig const &cfg,
               int iters = kPowerIters) -> double
{
  check_row(z, m);
  if (iters < 1) {
    throw Error("power iteration needs at least one step");
  }
  CxMatrix v = random_unit(z.pe(), z.coils());
  return 0.99 / power_norm(m, w, cfg, v, iters);
}

auto all_finite(CxMatrix const &x) -> bool
{
  for (Index k = 0; k < x.size(); k++) {
    if (!std::isfinite(x.data()[k].real()) || !std::isfinite(x.data()[k].imag())) {
      return false;
    }
  }
  return true;
}

} // namespace

auto objective(HybridRow const &e, HybridRow const &z, SamplingMask const &m, WeightMatrix const &w,
               SolverConfig const &cfg) -> double
{
  return objective_impl(e, z, m, &w, cfg);
}

auto auto_step(HybridRow const &z, SamplingMask const &m, WeightMatrix const &w, SolverConfig const &cfg,
               int iterations) -> double
{
  return step_impl(z, m, &w, cfg, iterations);
}

auto recon_row(HybridRow const &z, SamplingMask const &m, SolverConfig const &cfg)
  -> std::pair<HybridRow, ReconReport>
{
  auto const start = std::chrono::steady_clock::now();
  cfg.validate();
  check_row(z, m);
  double const lam1 = cfg.lowrank_weight();
  double const lam2 = cfg.sparse_weight();
  auto const hcfg = cfg.hankel.with_dims(z.pe(), z.coils());
  if (lam1 > 0.0) {
    hcfg.validate();
  }

  ReconReport report;
  report.row = z.row_index;
  HybridRow e = apply_mask(z, m);

  std::optional<WeightMatrix> w;
  CxMatrix a;     // Gram matrix of the current iterate
  CxMatrix power; // dominant direction of the step operator
  double gamma = cfg.gamma.value_or(0.0);
  double lambda0 = 0.0;
  auto refresh = [&](int k) {
    w = weight_update(a, hcfg.epsilon(lambda0, k));
    if (cfg.gamma) {
      return;
    }
    if (power.size() == 0) {
      power = random_unit(z.pe(), z.coils());
      gamma = 0.99 / power_norm(m, &*w, cfg, power, kPowerIters);
    } else {
      gamma = 0.99 / power_norm(m, &*w, cfg, power, kWarmPowerIters);
    }
  };
  auto current_objective = [&]() {
    double f = data_term(e.data, z.data, m);
    if (w) {
      f += lam1 * weighted_trace(*w, a);
    }
    if (lam2 > 0.0) {
      f += lam2 * sparse_term(e.data, cfg);
    }
    return f;
  };

  auto diverged = [&](int k) {
    throw NumericalError(
      fmt::format("diverged at iteration {} (step size {:.3g}); try a smaller step size", k, gamma));
  };

  bool const empty = e.data.isZero(0.0);
  bool const lowrank = lam1 > 0.0 && !empty;
  if (lowrank) {
    a = gram(e, hcfg);
    lambda0 = max_eigenvalue(a);
    refresh(1);
  } else if (!cfg.gamma) {
    gamma = step_impl(z, m, nullptr, cfg);
  }

  report.objective.push_back(current_objective());
  if (empty) {
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(e), std::move(report)};
  }

  for (int k = 1; k <= cfg.max_iters; k++) {
    if (lowrank && k > 1 && cfg.refresh_every > 0 && (k - 1) % cfg.refresh_every == 0) {
      refresh(k);
    }
    CxMatrix grad = data_residual(e.data, z.data, m);
    if (lowrank) {
      grad += (2.0 * lam1) * lowrank_grad(e, *w, hcfg).data;
    }
    CxMatrix next = e.data - gamma * grad;
    double const rho = gamma * lam2;
    if (rho > 0.0) {
      ifft_pe_inplace(next);
      auto coeffs = soft_threshold(frame_forward(next, cfg.frame_levels), rho, cfg.threshold_low_band);
      next = frame_adjoint(coeffs);
      fft_pe_inplace(next);
    }
    if (!all_finite(next)) {
      diverged(k);
    }
    double const prev = e.data.norm();
    double const diff = (next - e.data).norm();
    double const change = prev > 0.0 ? diff / prev : (diff > 0.0 ? INFINITY : 0.0);
    e.data = std::move(next);
    if (lowrank) {
      a = gram(e, hcfg);
      if (!all_finite(a)) {
        diverged(k);
      }
    }
    report.iterations = k;
    report.final_change = change;
    report.objective.push_back(current_objective());
    if (change < cfg.tol) {
      break;
    }
  }

  if (cfg.hard_replace) {
    for (Index i = 0; i < m.n(); i++) {
      if (m.sampled(i)) {
        e.data.row(i) = z.data.row(i);
      }
    }
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(e), std::move(report)};
}

auto zero_filled(ComplexTensor3 const &y) -> ComplexTensor3 { return ifft_pe(ifft_fe(y)); }

auto recon_image(ComplexTensor3 const &y, SamplingMask const &m, SolverConfig const &cfg, ReconOptions const &opts)
  -> ImageResult
{
  cfg.validate();
  if (y.pe() != m.n()) {
    throw Error(fmt::format("k-space has {} PE lines, mask has {}", y.pe(), m.n()));
  }
  for (Index r = 0; r < y.fe(); r++) {
    for (Index i = 0; i < y.pe(); i++) {
      if (m.sampled(i)) {
        continue;
      }
      for (Index j = 0; j < y.coils(); j++) {
        if (y(r, i, j) != Cx{0.0, 0.0}) {
          throw Error(fmt::format("k-space is non-zero at unsampled PE line {}", i));
        }
      }
    }
  }

  Index const rows = y.fe();
  std::vector<Index> order = opts.row_order;
  if (order.empty()) {
    order.resize(static_cast<std::size_t>(rows));
    for (Index r = 0; r < rows; r++) {
      order[static_cast<std::size_t>(r)] = r;
    }
  }
  {
    std::vector<Index> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    bool ok = static_cast<Index>(sorted.size()) == rows;
    for (Index r = 0; ok && r < rows; r++) {
      ok = sorted[static_cast<std::size_t>(r)] == r;
    }
    if (!ok) {
      throw Error("row order must be a permutation of the FE rows");
    }
  }

  ImageResult result;
  result.scale = cfg.normalize ? y.max_abs() : 1.0;
  if (!(result.scale > 0.0)) {
    result.scale = 1.0;
  }
  ComplexTensor3 ys = y;
  ys *= 1.0 / result.scale;
  ComplexTensor3 const hybrid = ifft_fe(ys);

  std::vector<HybridRow> solved(static_cast<std::size_t>(rows));
  result.rows.resize(static_cast<std::size_t>(rows));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(rows));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < order.size(); k = next++) {
      auto const r = static_cast<std::size_t>(order[k]);
      try {
        auto [row, rep] = recon_row(hybrid.row(static_cast<Index>(r)), m, cfg);
        solved[r] = std::move(row);
        result.rows[r] = std::move(rep);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  int const nthreads = std::clamp<int>(opts.threads, 1, static_cast<int>(std::max<Index>(rows, 1)));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; t++) {
      pool.emplace_back(worker);
    }
  }

  for (Index r = 0; r < rows; r++) {
    if (auto const &ep = errors[static_cast<std::size_t>(r)]) {
      try {
        std::rethrow_exception(ep);
      } catch (NumericalError const &e) {
        throw NumericalError(fmt::format("row {}: {}", r, e.what()));
      } catch (std::exception const &e) {
        throw Error(fmt::format("row {}: {}", r, e.what()));
      }
    }
  }

  ComplexTensor3 estimate(y.fe(), y.pe(), y.coils());
  for (Index r = 0; r < rows; r++) {
    estimate.set_row(r, solved[static_cast<std::size_t>(r)]);
  }
  result.image = ifft_pe(estimate);
  result.image *= result.scale;
  return result;
}

auto tune_params(std::span<std::pair<double, double> const> grid, ComplexTensor3 const &y, SamplingMask const &m,
                 RealImage const &truth, SolverConfig const &base, ReconOptions const &opts) -> TuneResult
{
  if (grid.empty()) {
    throw Error("parameter grid is empty");
  }
  TuneResult out;
  double best = INFINITY;
  for (std::size_t i = 0; i < grid.size(); i++) {
    SolverConfig cfg = base;
    cfg.lambda1 = grid[i].first;
    cfg.lambda2 = grid[i].second;
    auto const res = recon_image(y, m, cfg, opts);
    double const score = rlne(truth, sos_combine(res.image));
    out.rlne.push_back(score);
    if (score < best) {
      best = score;
      out.best = i;
      out.config = cfg;
    }
  }
  if (!std::isfinite(best)) {
    throw NumericalError("no grid point produced a finite RLNE");
  }
  return out;
}

} // namespace lsr
