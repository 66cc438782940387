#include "lsr/metrics.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace lsr {

namespace {

void check_dims(RealImage const &a, RealImage const &b)
{
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(fmt::format("image sizes differ: {}x{} vs {}x{}", a.rows(), a.cols(), b.rows(), b.cols()));
  }
}

} // namespace

auto rlne(RealImage const &ref, RealImage const &test) -> double
{
  check_dims(ref, test);
  double const den = ref.matrix().norm();
  if (!(den > 0.0)) {
    throw Error("RLNE needs a reference with non-zero norm");
  }
  return (ref - test).matrix().norm() / den;
}

auto psnr(RealImage const &ref, RealImage const &test, PsnrForm form) -> double
{
  check_dims(ref, test);
  double const err2 = (ref - test).square().sum();
  if (err2 == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  auto const count = static_cast<double>(ref.size());
  double const peak = ref.abs().maxCoeff();
  if (form == PsnrForm::Literal) {
    return 10.0 * std::log10(count * peak / std::sqrt(err2));
  }
  return 10.0 * std::log10(count * peak * peak / err2);
}

auto ssim(RealImage const &ref, RealImage const &test) -> double
{
  check_dims(ref, test);
  if ((ref == test).all()) {
    return 1.0;
  }
  auto const count = static_cast<double>(ref.size());
  double const mx = ref.mean();
  double const my = test.mean();
  double const vx = (ref - mx).square().sum() / count;
  double const vy = (test - my).square().sum() / count;
  double const cxy = ((ref - mx) * (test - my)).sum() / count;
  double const peak = ref.maxCoeff();
  double const c1 = (0.01 * peak) * (0.01 * peak);
  double const c2 = (0.03 * peak) * (0.03 * peak);
  double const num = (2.0 * mx * my + c1) * (2.0 * cxy + c2);
  double const den = (mx * mx + my * my + c1) * (vx + vy + c2);
  if (den == 0.0) {
    return 0.0;
  }
  return num / den;
}

auto evaluate(RealImage const &ref, RealImage const &test) -> MetricsReport
{
  return MetricsReport{.rlne = rlne(ref, test), .psnr_db = psnr(ref, test), .ssim = ssim(ref, test)};
}

} // namespace lsr
