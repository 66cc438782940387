#pragma once

#include "types.hpp"

namespace lsr {

enum class PsnrForm
{
  Squared, // 10 log10(MN ||x||_inf^2 / ||x - xhat||_2^2)
  Literal  // 10 log10(MN ||x||_inf / ||x - xhat||_2), as printed in the original definition
};

struct MetricsReport
{
  double rlne = 0.0;
  double psnr_db = 0.0; // +inf when the images are identical
  double ssim = 1.0;
};

auto rlne(RealImage const &ref, RealImage const &test) -> double;
auto psnr(RealImage const &ref, RealImage const &test, PsnrForm form = PsnrForm::Squared) -> double;

/// Whole-image SSIM with population statistics, C1 = (0.01 L)^2 and
/// C2 = (0.03 L)^2 where L = max(ref).
auto ssim(RealImage const &ref, RealImage const &test) -> double;

auto evaluate(RealImage const &ref, RealImage const &test) -> MetricsReport;

} // namespace lsr
