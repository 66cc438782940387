#pragma once

#include "types.hpp"

#include <cstdint>

namespace lsr {

/// Phase-encoding line selector. Acquired lines are kept, the rest zeroed.
class SamplingMask
{
public:
  explicit SamplingMask(std::vector<bool> sampled, std::uint64_t seed = 0);

  auto n() const -> Index { return static_cast<Index>(sampled_.size()); }
  auto seed() const -> std::uint64_t { return seed_; }
  auto sampled(Index i) const -> bool { return sampled_[static_cast<std::size_t>(i)]; }
  auto count() const -> Index;
  auto indices() const -> std::vector<Index>;
  auto lines() const -> std::vector<bool> const & { return sampled_; }

  friend auto operator==(SamplingMask const &, SamplingMask const &) -> bool = default;

private:
  std::vector<bool> sampled_;
  std::uint64_t seed_ = 0;
};

inline constexpr double kDefaultCenterFraction = 0.08;

// Contiguous block of `count` lines around n/2.
auto center_block(Index n, Index count) -> std::pair<Index, Index>;

/// Fully sampled center of ceil(center_fraction * n) lines plus uniform random
/// lines (without replacement) up to round(n / af) in total.
auto gen_cartesian(Index n, double af, double center_fraction, std::uint64_t seed) -> SamplingMask;

/// Every af-th line from 0, plus `acs` center lines.
auto gen_uniform(Index n, Index af, Index acs) -> SamplingMask;

/// As gen_cartesian, but lines at or above ceil(fraction * n) are never acquired.
auto gen_partial_fourier(Index n, double fraction, double af, double center_fraction, std::uint64_t seed)
  -> SamplingMask;

auto apply_mask(HybridRow const &z, SamplingMask const &m) -> HybridRow;
auto apply_mask(ComplexTensor3 const &k, SamplingMask const &m) -> ComplexTensor3;
void apply_mask_inplace(CxMatrix &z, SamplingMask const &m);

// The mask is a 0/1 diagonal projection.
inline auto adjoint_mask(HybridRow const &z, SamplingMask const &m) -> HybridRow { return apply_mask(z, m); }

auto af_of(SamplingMask const &m) -> double;

} // namespace lsr
