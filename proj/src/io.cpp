#include "lsr/io.hpp"

#include <fmt/format.h>

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

namespace lsr {

namespace {

constexpr std::uint8_t kVersion = 1;
constexpr std::uint8_t kDims = 3;

void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v)
{
  for (int b = 0; b < 4; b++) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
}

void put_u64(std::vector<std::uint8_t> &out, std::uint64_t v)
{
  for (int b = 0; b < 8; b++) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
}

auto get_u32(std::uint8_t const *p) -> std::uint32_t
{
  std::uint32_t v = 0;
  for (int b = 0; b < 4; b++) {
    v |= static_cast<std::uint32_t>(p[b]) << (8 * b);
  }
  return v;
}

auto get_u64(std::uint8_t const *p) -> std::uint64_t
{
  std::uint64_t v = 0;
  for (int b = 0; b < 8; b++) {
    v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  }
  return v;
}

} // namespace

auto encode_tensor(ComplexTensor3 const &t) -> std::vector<std::uint8_t>
{
  std::vector<std::uint8_t> out;
  out.reserve(kTensorHeaderBytes + static_cast<std::size_t>(t.size()) * 8);
  for (char c : {'C', 'P', 'L', 'X'}) {
    out.push_back(static_cast<std::uint8_t>(c));
  }
  out.push_back(kVersion);
  out.push_back(kDims);
  put_u64(out, static_cast<std::uint64_t>(t.fe()));
  put_u64(out, static_cast<std::uint64_t>(t.pe()));
  put_u64(out, static_cast<std::uint64_t>(t.coils()));
  for (auto const &v : t.data()) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v.real())));
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v.imag())));
  }
  return out;
}

auto decode_tensor(std::span<std::uint8_t const> bytes) -> ComplexTensor3
{
  if (bytes.size() < 4 || bytes[0] != 'C' || bytes[1] != 'P' || bytes[2] != 'L' || bytes[3] != 'X') {
    throw Error("bad magic");
  }
  if (bytes.size() < kTensorHeaderBytes) {
    throw Error("unexpected EOF in tensor header");
  }
  if (bytes[4] != kVersion) {
    throw Error(fmt::format("unsupported tensor version {}", bytes[4]));
  }
  if (bytes[5] != kDims) {
    throw Error(fmt::format("expected 3 dimensions, file has {}", bytes[5]));
  }
  std::uint64_t dims[3];
  for (int d = 0; d < 3; d++) {
    dims[d] = get_u64(bytes.data() + 6 + 8 * d);
    if (dims[d] == 0) {
      throw Error("tensor dimension is zero");
    }
  }
  // every element needs 8 bytes, so anything beyond the payload size overflows
  std::uint64_t const limit = std::numeric_limits<std::uint64_t>::max() / 8;
  std::uint64_t count = 1;
  for (auto d : dims) {
    if (d > limit / count) {
      throw Error("dim overflow");
    }
    count *= d;
  }
  if (count > static_cast<std::uint64_t>(std::numeric_limits<Index>::max() / 8)) {
    throw Error("dim overflow");
  }
  std::uint64_t const payload = bytes.size() - kTensorHeaderBytes;
  if (payload < count * 8) {
    throw Error("unexpected EOF in tensor payload");
  }
  if (payload > count * 8) {
    throw Error("trailing bytes after tensor payload");
  }
  ComplexTensor3 t(static_cast<Index>(dims[0]), static_cast<Index>(dims[1]), static_cast<Index>(dims[2]));
  auto const *p = bytes.data() + kTensorHeaderBytes;
  for (auto &v : t.data()) {
    float const re = std::bit_cast<float>(get_u32(p));
    float const im = std::bit_cast<float>(get_u32(p + 4));
    v = Cx{re, im};
    p += 8;
  }
  return t;
}

void write_tensor(std::filesystem::path const &path, ComplexTensor3 const &t)
{
  auto const bytes = encode_tensor(t);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw Error(fmt::format("cannot open {} for writing", path.string()));
  }
  f.write(reinterpret_cast<char const *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) {
    throw Error(fmt::format("failed writing {}", path.string()));
  }
}

auto read_tensor(std::filesystem::path const &path) -> ComplexTensor3
{
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw Error(fmt::format("cannot open {}", path.string()));
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  try {
    return decode_tensor(bytes);
  } catch (Error const &e) {
    throw Error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

auto mask_to_json(SamplingMask const &m) -> nlohmann::json
{
  nlohmann::json j;
  j["n"] = m.n();
  j["sampled"] = m.indices();
  j["seed"] = m.seed();
  return j;
}

auto mask_from_json(nlohmann::json const &j) -> SamplingMask
{
  try {
    auto const n = j.at("n").get<Index>();
    if (n < 1) {
      throw Error("mask size must be positive");
    }
    std::vector<bool> sampled(static_cast<std::size_t>(n), false);
    Index prev = -1;
    for (auto const &v : j.at("sampled")) {
      auto const i = v.get<Index>();
      if (i <= prev || i >= n) {
        throw Error("mask indices must be ascending and within [0, n)");
      }
      sampled[static_cast<std::size_t>(i)] = true;
      prev = i;
    }
    auto const seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : 0;
    return SamplingMask(std::move(sampled), seed);
  } catch (nlohmann::json::exception const &e) {
    throw Error(fmt::format("malformed mask JSON: {}", e.what()));
  }
}

void write_mask(std::filesystem::path const &path, SamplingMask const &m)
{
  std::ofstream f(path, std::ios::trunc);
  if (!f) {
    throw Error(fmt::format("cannot open {} for writing", path.string()));
  }
  f << mask_to_json(m).dump() << '\n';
}

auto read_mask(std::filesystem::path const &path) -> SamplingMask
{
  std::ifstream f(path);
  if (!f) {
    throw Error(fmt::format("cannot open {}", path.string()));
  }
  try {
    return mask_from_json(nlohmann::json::parse(f));
  } catch (nlohmann::json::exception const &e) {
    throw Error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

auto metrics_to_json(MetricsReport const &r) -> nlohmann::json
{
  nlohmann::json j;
  j["rlne"] = r.rlne;
  j["psnr_db"] = std::isfinite(r.psnr_db) ? nlohmann::json(r.psnr_db) : nlohmann::json(nullptr);
  j["ssim"] = r.ssim;
  return j;
}

} // namespace lsr
