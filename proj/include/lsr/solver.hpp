#pragma once

#include "lowrank.hpp"
#include "sampling.hpp"

#include <optional>
#include <utility>

namespace lsr {

enum class Prior
{
  Full,
  LowRankOnly,
  SparseOnly
};

auto prior_from_string(std::string const &s) -> Prior;
auto to_string(Prior p) -> std::string;

struct SolverConfig
{
  double lambda1 = 1e-3;          // weighted Hankel (low-rank) term
  double lambda2 = 1e-3;          // frame l1 term; the threshold is gamma * lambda2
  std::optional<double> gamma = 1.0; // empty selects auto_step
  int max_iters = 50;
  double tol = 1e-6; // relative iterate change
  Prior mode = Prior::Full;
  HankelConfig hankel;   // n and coils are taken from the data
  int frame_levels = 3;
  int refresh_every = 1; // 0 keeps the weight computed from the initial iterate
  bool threshold_low_band = true;
  bool hard_replace = false; // overwrite acquired lines after the final iteration
  bool normalize = true;     // recon_image scales k-space to max |Y| = 1

  auto lowrank_weight() const -> double { return mode == Prior::SparseOnly ? 0.0 : lambda1; }
  auto sparse_weight() const -> double { return mode == Prior::LowRankOnly ? 0.0 : lambda2; }
  void validate() const;
};

struct ReconReport
{
  Index row = 0;
  int iterations = 0;
  std::vector<double> objective; // objective[0] is the initial iterate
  double final_change = 0.0;
  double seconds = 0.0;
};

/// 0.5 ||z - U e||^2 + lambda1 ||H(e) Q||_F^2 + lambda2 ||D F_PE^* e||_1, with the
/// Frobenius term evaluated as trace(W gram(e)).
auto objective(HybridRow const &e, HybridRow const &z, SamplingMask const &m, WeightMatrix const &w,
               SolverConfig const &cfg) -> double;

/// 0.99 over a power-iteration estimate (fixed random start) of the norm of
/// e -> U e + 2 lambda1 G_W(e).
auto auto_step(HybridRow const &z, SamplingMask const &m, WeightMatrix const &w, SolverConfig const &cfg,
               int iterations = 20) -> double;

/// Projected iterative soft thresholding for one hybrid row, with the IRLS
/// weight refreshed from the current iterate.
auto recon_row(HybridRow const &z, SamplingMask const &m, SolverConfig const &cfg)
  -> std::pair<HybridRow, ReconReport>;

struct ReconOptions
{
  int threads = 1;
  std::vector<Index> row_order; // empty means 0..M-1
};

struct ImageResult
{
  ComplexTensor3 image; // spatial coil images
  std::vector<ReconReport> rows;
  double scale = 1.0;
};

/// Inverse FE transform, independent per-row solves, inverse PE transform.
auto recon_image(ComplexTensor3 const &y, SamplingMask const &m, SolverConfig const &cfg,
                 ReconOptions const &opts = {}) -> ImageResult;

auto zero_filled(ComplexTensor3 const &y) -> ComplexTensor3;

struct TuneResult
{
  SolverConfig config;
  std::size_t best = 0;
  std::vector<double> rlne;
};

/// Grid search over (lambda1, lambda2) by RLNE of the SOS image against `truth`.
/// Ties go to the earliest grid entry.
auto tune_params(std::span<std::pair<double, double> const> grid, ComplexTensor3 const &y, SamplingMask const &m,
                 RealImage const &truth, SolverConfig const &base, ReconOptions const &opts = {}) -> TuneResult;

} // namespace lsr
