#pragma once

#include "types.hpp"

namespace lsr {

enum class Direction
{
  Forward,
  Inverse
};

/// Unitary 1D DFT in place, with DC stored at index n/2 (rounded down) on both
/// sides of the transform. Safe to call concurrently.
void centered_dft(std::span<Cx> x, Direction dir);

auto fft_fe(ComplexTensor3 const &t) -> ComplexTensor3;
auto ifft_fe(ComplexTensor3 const &t) -> ComplexTensor3;

// Along PE for every FE row and coil.
auto fft_pe(ComplexTensor3 const &t) -> ComplexTensor3;
auto ifft_pe(ComplexTensor3 const &t) -> ComplexTensor3;

auto fft_pe(HybridRow const &row) -> HybridRow;
auto ifft_pe(HybridRow const &row) -> HybridRow;

// Column-wise variants used inside the solver loop.
void fft_pe_inplace(CxMatrix &x);
void ifft_pe_inplace(CxMatrix &x);

/// Square root of the sum of squares over coils.
auto sos_combine(ComplexTensor3 const &img) -> RealImage;

} // namespace lsr
