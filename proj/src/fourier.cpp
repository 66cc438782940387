#include "lsr/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace lsr {

ComplexTensor3::ComplexTensor3(Index m, Index n, Index coils)
  : m_{m}
  , n_{n}
  , j_{coils}
{
  if (m < 1 || n < 1 || coils < 1) {
    throw Error("tensor dimensions must be positive");
  }
  data_.assign(static_cast<std::size_t>(m * n * coils), Cx{0.0, 0.0});
}

auto ComplexTensor3::row(Index m) const -> HybridRow
{
  HybridRow r(n_, j_, m);
  for (Index n = 0; n < n_; n++) {
    for (Index j = 0; j < j_; j++) {
      r.data(n, j) = (*this)(m, n, j);
    }
  }
  return r;
}

void ComplexTensor3::set_row(Index m, HybridRow const &r)
{
  if (r.pe() != n_ || r.coils() != j_) {
    throw Error("row shape does not match tensor");
  }
  for (Index n = 0; n < n_; n++) {
    for (Index j = 0; j < j_; j++) {
      (*this)(m, n, j) = r.data(n, j);
    }
  }
}

auto ComplexTensor3::norm() const -> double
{
  double s = 0.0;
  for (auto const &v : data_) {
    s += std::norm(v);
  }
  return std::sqrt(s);
}

auto ComplexTensor3::max_abs() const -> double
{
  double s = 0.0;
  for (auto const &v : data_) {
    s = std::max(s, std::abs(v));
  }
  return s;
}

auto ComplexTensor3::operator*=(double s) -> ComplexTensor3 &
{
  for (auto &v : data_) {
    v *= s;
  }
  return *this;
}

auto dot(HybridRow const &a, HybridRow const &b) -> Cx
{
  return (a.data.array().conjugate() * b.data.array()).sum();
}

auto dot(ComplexTensor3 const &a, ComplexTensor3 const &b) -> Cx
{
  if (!a.same_shape(b)) {
    throw Error("dot of tensors with different shapes");
  }
  Cx s{0.0, 0.0};
  auto const da = a.data();
  auto const db = b.data();
  for (std::size_t i = 0; i < da.size(); i++) {
    s += std::conj(da[i]) * db[i];
  }
  return s;
}

namespace {

// FFTW planning is not thread-safe, execution with fftw_execute_dft is.
class PlanCache
{
public:
  static auto instance() -> PlanCache &
  {
    static PlanCache cache;
    return cache;
  }

  auto get(int n, int sign) -> fftw_plan
  {
    std::lock_guard lock(mutex_);
    auto const key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) {
      return it->second;
    }
    auto *buf = fftw_alloc_complex(static_cast<std::size_t>(n));
    auto plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(PlanCache const &) = delete;
  auto operator=(PlanCache const &) -> PlanCache & = delete;

private:
  PlanCache() = default;
  ~PlanCache()
  {
    for (auto &[key, plan] : plans_) {
      fftw_destroy_plan(plan);
    }
  }

  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

template <typename Get, typename Set>
void transform_strided(Index len, Index count, Get get, Set set, Direction dir)
{
  std::vector<Cx> buf(static_cast<std::size_t>(len));
  for (Index c = 0; c < count; c++) {
    for (Index i = 0; i < len; i++) {
      buf[static_cast<std::size_t>(i)] = get(c, i);
    }
    centered_dft(buf, dir);
    for (Index i = 0; i < len; i++) {
      set(c, i, buf[static_cast<std::size_t>(i)]);
    }
  }
}

auto transform_fe(ComplexTensor3 const &t, Direction dir) -> ComplexTensor3
{
  ComplexTensor3 out(t.fe(), t.pe(), t.coils());
  Index const nj = t.pe() * t.coils();
  transform_strided(
    t.fe(), nj, [&](Index c, Index m) { return t(m, c / t.coils(), c % t.coils()); },
    [&](Index c, Index m, Cx v) { out(m, c / t.coils(), c % t.coils()) = v; }, dir);
  return out;
}

auto transform_pe(ComplexTensor3 const &t, Direction dir) -> ComplexTensor3
{
  ComplexTensor3 out(t.fe(), t.pe(), t.coils());
  Index const mj = t.fe() * t.coils();
  transform_strided(
    t.pe(), mj, [&](Index c, Index n) { return t(c / t.coils(), n, c % t.coils()); },
    [&](Index c, Index n, Cx v) { out(c / t.coils(), n, c % t.coils()) = v; }, dir);
  return out;
}

void transform_columns(CxMatrix &x, Direction dir)
{
  for (Index j = 0; j < x.cols(); j++) {
    centered_dft(std::span<Cx>(x.col(j).data(), static_cast<std::size_t>(x.rows())), dir);
  }
}

} // namespace

void centered_dft(std::span<Cx> x, Direction dir)
{
  auto const n = x.size();
  if (n == 0) {
    return;
  }
  auto const half = n / 2;
  std::rotate(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(half), x.end());
  auto plan = PlanCache::instance().get(static_cast<int>(n), dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD);
  auto *ptr = reinterpret_cast<fftw_complex *>(x.data());
  fftw_execute_dft(plan, ptr, ptr);
  std::rotate(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n - half), x.end());
  double const scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto &v : x) {
    v *= scale;
  }
}

auto fft_fe(ComplexTensor3 const &t) -> ComplexTensor3 { return transform_fe(t, Direction::Forward); }
auto ifft_fe(ComplexTensor3 const &t) -> ComplexTensor3 { return transform_fe(t, Direction::Inverse); }
auto fft_pe(ComplexTensor3 const &t) -> ComplexTensor3 { return transform_pe(t, Direction::Forward); }
auto ifft_pe(ComplexTensor3 const &t) -> ComplexTensor3 { return transform_pe(t, Direction::Inverse); }

void fft_pe_inplace(CxMatrix &x) { transform_columns(x, Direction::Forward); }
void ifft_pe_inplace(CxMatrix &x) { transform_columns(x, Direction::Inverse); }

auto fft_pe(HybridRow const &row) -> HybridRow
{
  HybridRow out = row;
  fft_pe_inplace(out.data);
  return out;
}

auto ifft_pe(HybridRow const &row) -> HybridRow
{
  HybridRow out = row;
  ifft_pe_inplace(out.data);
  return out;
}

auto sos_combine(ComplexTensor3 const &img) -> RealImage
{
  RealImage out = RealImage::Zero(img.fe(), img.pe());
  for (Index m = 0; m < img.fe(); m++) {
    for (Index n = 0; n < img.pe(); n++) {
      double s = 0.0;
      for (Index j = 0; j < img.coils(); j++) {
        s += std::norm(img(m, n, j));
      }
      out(m, n) = std::sqrt(s);
    }
  }
  return out;
}

} // namespace lsr
