#pragma once

#include "types.hpp"

#include <cstdint>

namespace lsr {

struct PhantomSpec
{
  Index m = 64;
  Index n = 64;
  Index coils = 4;
  Index support = 5; // odd, centered k-space support of each sensitivity per axis
  Index shapes = 6;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Phantom
{
  ComplexTensor3 image;         // M x N x 1 object
  ComplexTensor3 sensitivities; // M x N x J, SOS equal to one everywhere
  ComplexTensor3 coil_images;
  ComplexTensor3 kspace; // fully sampled, centered
};

/// Piecewise-constant ellipses and rectangles with a smooth phase, seen through
/// coils whose sensitivities are band-limited in k-space before a joint SOS
/// normalization. Deterministic in the seed.
auto gen_phantom(PhantomSpec const &spec) -> Phantom;

} // namespace lsr
