#include "lsr/phantom.hpp"

#include "lsr/fourier.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>
#include <random>

namespace lsr {

void PhantomSpec::validate() const
{
  if (m < 1 || n < 1 || coils < 1) {
    throw Error("phantom dimensions must be positive");
  }
  if (support < 1 || support > std::min(m, n) || support % 2 == 0) {
    throw Error(fmt::format("sensitivity support {} must be odd and within [1, {}]", support, std::min(m, n)));
  }
  if (shapes < 0) {
    throw Error("shape count must be non-negative");
  }
}

namespace {

auto draw_object(PhantomSpec const &spec, std::mt19937_64 &rng) -> ComplexTensor3
{
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  auto const fm = static_cast<double>(spec.m);
  auto const fn = static_cast<double>(spec.n);

  RealImage mag = RealImage::Zero(spec.m, spec.n);
  for (Index s = 0; s < spec.shapes; s++) {
    bool const body = s == 0;
    bool const ellipse = body || unit(rng) < 0.6;
    double const cm = body ? uniform(0.47, 0.53) * fm : uniform(0.3, 0.7) * fm;
    double const cn = body ? uniform(0.47, 0.53) * fn : uniform(0.3, 0.7) * fn;
    double const am = body ? uniform(0.35, 0.45) * fm : uniform(0.05, 0.18) * fm;
    double const an = body ? uniform(0.35, 0.45) * fn : uniform(0.05, 0.18) * fn;
    double const value = uniform(0.2, 1.0);
    for (Index i = 0; i < spec.m; i++) {
      for (Index k = 0; k < spec.n; k++) {
        double const u = (static_cast<double>(i) + 0.5 - cm) / am;
        double const v = (static_cast<double>(k) + 0.5 - cn) / an;
        bool const inside = ellipse ? u * u + v * v <= 1.0 : std::abs(u) <= 1.0 && std::abs(v) <= 1.0;
        if (inside) {
          mag(i, k) = value;
        }
      }
    }
  }

  double const half = std::numbers::pi / 2.0;
  double const p0 = uniform(-std::numbers::pi, std::numbers::pi);
  double const p1 = uniform(-half, half);
  double const p2 = uniform(-half, half);
  double const p3 = uniform(-half, half);
  ComplexTensor3 img(spec.m, spec.n, 1);
  for (Index i = 0; i < spec.m; i++) {
    for (Index k = 0; k < spec.n; k++) {
      double const x = static_cast<double>(i) / fm - 0.5;
      double const y = static_cast<double>(k) / fn - 0.5;
      img(i, k, 0) = std::polar(mag(i, k), p0 + p1 * x + p2 * y + p3 * x * y);
    }
  }
  return img;
}

auto draw_sensitivities(PhantomSpec const &spec, std::mt19937_64 &rng) -> ComplexTensor3
{
  std::normal_distribution<double> normal;
  Index const half = spec.support / 2;
  for (int attempt = 0; attempt < 64; attempt++) {
    ComplexTensor3 k(spec.m, spec.n, spec.coils);
    for (Index j = 0; j < spec.coils; j++) {
      for (Index a = -half; a <= half; a++) {
        for (Index b = -half; b <= half; b++) {
          double const taper = 1.0 / (1.0 + std::hypot(static_cast<double>(a), static_cast<double>(b)));
          Cx const c{normal(rng), normal(rng)};
          k(spec.m / 2 + a, spec.n / 2 + b, j) = taper * c;
        }
      }
    }
    ComplexTensor3 sens = ifft_pe(ifft_fe(k));
    RealImage const sos = sos_combine(sens);
    if (sos.minCoeff() < 1e-3 * sos.maxCoeff()) {
      continue;
    }
    for (Index i = 0; i < spec.m; i++) {
      for (Index n = 0; n < spec.n; n++) {
        for (Index j = 0; j < spec.coils; j++) {
          sens(i, n, j) /= sos(i, n);
        }
      }
    }
    return sens;
  }
  throw NumericalError("could not draw coil sensitivities without a near-zero SOS");
}

} // namespace

auto gen_phantom(PhantomSpec const &spec) -> Phantom
{
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  Phantom p;
  p.image = draw_object(spec, rng);
  p.sensitivities = draw_sensitivities(spec, rng);
  p.coil_images = ComplexTensor3(spec.m, spec.n, spec.coils);
  for (Index i = 0; i < spec.m; i++) {
    for (Index n = 0; n < spec.n; n++) {
      for (Index j = 0; j < spec.coils; j++) {
        p.coil_images(i, n, j) = p.image(i, n, 0) * p.sensitivities(i, n, j);
      }
    }
  }
  p.kspace = fft_pe(fft_fe(p.coil_images));
  return p;
}

} // namespace lsr
