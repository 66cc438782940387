#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsr {

using Index = Eigen::Index;
using Cx = std::complex<double>;
using CxMatrix = Eigen::MatrixXcd;
using CxVector = Eigen::VectorXcd;
using RealImage = Eigen::ArrayXXd;

// Invalid arguments, dimension mismatches, malformed files.
struct Error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Non-finite iterates and other numerical breakdowns.
struct NumericalError : Error
{
  using Error::Error;
};

// One FE row of hybrid data: N (PE) x J (coils), coil j in column j.
struct HybridRow
{
  CxMatrix data;
  Index row_index = 0;

  HybridRow() = default;
  HybridRow(Index n, Index coils, Index row = 0)
    : data{CxMatrix::Zero(n, coils)}
    , row_index{row}
  {
  }
  HybridRow(CxMatrix d, Index row = 0)
    : data{std::move(d)}
    , row_index{row}
  {
  }

  auto pe() const -> Index { return data.rows(); }
  auto coils() const -> Index { return data.cols(); }
  auto norm() const -> double { return data.norm(); }
};

auto dot(HybridRow const &a, HybridRow const &b) -> Cx;

// M (FE) x N (PE) x J (coils), row-major with the coil index fastest, so
// each FE row is one contiguous N*J block.
class ComplexTensor3
{
public:
  ComplexTensor3() = default;
  ComplexTensor3(Index m, Index n, Index coils);

  auto fe() const -> Index { return m_; }
  auto pe() const -> Index { return n_; }
  auto coils() const -> Index { return j_; }
  auto size() const -> Index { return m_ * n_ * j_; }

  auto operator()(Index m, Index n, Index j) -> Cx & { return data_[static_cast<std::size_t>((m * n_ + n) * j_ + j)]; }
  auto operator()(Index m, Index n, Index j) const -> Cx const &
  {
    return data_[static_cast<std::size_t>((m * n_ + n) * j_ + j)];
  }

  auto data() -> std::span<Cx> { return data_; }
  auto data() const -> std::span<Cx const> { return data_; }

  auto row(Index m) const -> HybridRow;
  void set_row(Index m, HybridRow const &r);

  auto norm() const -> double;
  auto max_abs() const -> double;
  auto same_shape(ComplexTensor3 const &o) const -> bool { return m_ == o.m_ && n_ == o.n_ && j_ == o.j_; }

  auto operator*=(double s) -> ComplexTensor3 &;
  friend auto operator==(ComplexTensor3 const &, ComplexTensor3 const &) -> bool = default;

private:
  Index m_ = 0;
  Index n_ = 0;
  Index j_ = 0;
  std::vector<Cx> data_;
};

auto dot(ComplexTensor3 const &a, ComplexTensor3 const &b) -> Cx;

} // namespace lsr
