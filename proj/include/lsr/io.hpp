#pragma once

#include "metrics.hpp"
#include "sampling.hpp"
#include "types.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>

namespace lsr {

// Tensor file layout, all little-endian:
//   "CPLX" | u8 version (1) | u8 ndim (3) | 3 x u64 dims (M, N, J) |
//   M*N*J interleaved f32 (re, im), coil index fastest.
inline constexpr std::size_t kTensorHeaderBytes = 4 + 1 + 1 + 3 * 8;

auto encode_tensor(ComplexTensor3 const &t) -> std::vector<std::uint8_t>;
auto decode_tensor(std::span<std::uint8_t const> bytes) -> ComplexTensor3;

void write_tensor(std::filesystem::path const &path, ComplexTensor3 const &t);
auto read_tensor(std::filesystem::path const &path) -> ComplexTensor3;

// {"n": int, "sampled": [ascending indices], "seed": int}
auto mask_to_json(SamplingMask const &m) -> nlohmann::json;
auto mask_from_json(nlohmann::json const &j) -> SamplingMask;
void write_mask(std::filesystem::path const &path, SamplingMask const &m);
auto read_mask(std::filesystem::path const &path) -> SamplingMask;

// {"rlne": x, "psnr_db": x, "ssim": x}; an infinite PSNR is written as null.
auto metrics_to_json(MetricsReport const &r) -> nlohmann::json;

} // namespace lsr
