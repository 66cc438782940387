#include "lsr/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lsr {

SamplingMask::SamplingMask(std::vector<bool> sampled, std::uint64_t seed)
  : sampled_{std::move(sampled)}
  , seed_{seed}
{
  if (std::none_of(sampled_.begin(), sampled_.end(), [](bool b) { return b; })) {
    throw Error("mask must sample at least one line");
  }
}

auto SamplingMask::count() const -> Index
{
  return static_cast<Index>(std::count(sampled_.begin(), sampled_.end(), true));
}

auto SamplingMask::indices() const -> std::vector<Index>
{
  std::vector<Index> out;
  for (Index i = 0; i < n(); i++) {
    if (sampled(i)) {
      out.push_back(i);
    }
  }
  return out;
}

auto center_block(Index n, Index count) -> std::pair<Index, Index>
{
  count = std::clamp<Index>(count, 0, n);
  Index const start = std::clamp<Index>(n / 2 - count / 2, 0, n - count);
  return {start, start + count};
}

namespace {

// Center block plus random fill, restricted to indices below `limit`.
auto center_plus_random(Index n, Index limit, double af, double center_fraction, std::uint64_t seed)
  -> SamplingMask
{
  if (n < 4) {
    throw Error("mask needs at least 4 lines");
  }
  if (!(af >= 1.0) || af > static_cast<double>(n)) {
    throw Error("acceleration factor must lie in [1, n]");
  }
  if (!(center_fraction >= 0.0) || center_fraction >= 1.0) {
    throw Error("center fraction must lie in [0, 1)");
  }
  auto const budget = static_cast<Index>(std::lround(static_cast<double>(n) / af));
  if (budget > limit) {
    throw Error("af infeasible for fraction");
  }
  auto const center = static_cast<Index>(std::ceil(center_fraction * static_cast<double>(n) - 1e-12));
  if (center > budget) {
    throw Error("center exceeds budget");
  }

  std::vector<bool> sampled(static_cast<std::size_t>(n), false);
  auto const [lo, hi] = center_block(n, center);
  Index taken = 0;
  for (Index i = lo; i < std::min(hi, limit); i++) {
    sampled[static_cast<std::size_t>(i)] = true;
    taken++;
  }

  std::vector<Index> rest;
  for (Index i = 0; i < limit; i++) {
    if (!sampled[static_cast<std::size_t>(i)]) {
      rest.push_back(i);
    }
  }
  std::mt19937_64 rng(seed);
  std::shuffle(rest.begin(), rest.end(), rng);
  for (Index k = 0; k < budget - taken; k++) {
    sampled[static_cast<std::size_t>(rest[static_cast<std::size_t>(k)])] = true;
  }
  return SamplingMask(std::move(sampled), seed);
}

} // namespace

auto gen_cartesian(Index n, double af, double center_fraction, std::uint64_t seed) -> SamplingMask
{
  return center_plus_random(n, n, af, center_fraction, seed);
}

auto gen_partial_fourier(Index n, double fraction, double af, double center_fraction, std::uint64_t seed)
  -> SamplingMask
{
  if (!(fraction > 0.5) || fraction > 1.0) {
    throw Error("partial Fourier fraction must lie in (0.5, 1]");
  }
  auto const limit = static_cast<Index>(std::ceil(fraction * static_cast<double>(n) - 1e-12));
  return center_plus_random(n, limit, af, center_fraction, seed);
}

auto gen_uniform(Index n, Index af, Index acs) -> SamplingMask
{
  if (af < 1 || af > n) {
    throw Error("uniform acceleration must lie in [1, n]");
  }
  if (acs < 0 || acs > n) {
    throw Error("acs must lie in [0, n]");
  }
  std::vector<bool> sampled(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < n; i += af) {
    sampled[static_cast<std::size_t>(i)] = true;
  }
  auto const [lo, hi] = center_block(n, acs);
  for (Index i = lo; i < hi; i++) {
    sampled[static_cast<std::size_t>(i)] = true;
  }
  return SamplingMask(std::move(sampled), 0);
}

void apply_mask_inplace(CxMatrix &z, SamplingMask const &m)
{
  if (z.rows() != m.n()) {
    throw Error("mask length does not match PE size");
  }
  for (Index i = 0; i < m.n(); i++) {
    if (!m.sampled(i)) {
      z.row(i).setZero();
    }
  }
}

auto apply_mask(HybridRow const &z, SamplingMask const &m) -> HybridRow
{
  HybridRow out = z;
  apply_mask_inplace(out.data, m);
  return out;
}

auto apply_mask(ComplexTensor3 const &k, SamplingMask const &m) -> ComplexTensor3
{
  if (k.pe() != m.n()) {
    throw Error("mask length does not match PE size");
  }
  ComplexTensor3 out = k;
  for (Index r = 0; r < k.fe(); r++) {
    for (Index i = 0; i < k.pe(); i++) {
      if (!m.sampled(i)) {
        for (Index j = 0; j < k.coils(); j++) {
          out(r, i, j) = Cx{0.0, 0.0};
        }
      }
    }
  }
  return out;
}

auto af_of(SamplingMask const &m) -> double
{
  return static_cast<double>(m.n()) / static_cast<double>(m.count());
}

} // namespace lsr
