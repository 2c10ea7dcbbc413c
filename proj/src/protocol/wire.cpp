#include "agentsim/protocol/wire.hpp"

#include <bit>
#include <cstring>
#include <limits>

#include "agentsim/core/error.hpp"

namespace agentsim::protocol {

void Writer::u16(std::uint16_t v) {
  u8(static_cast<std::uint8_t>(v));
  u8(static_cast<std::uint8_t>(v >> 8));
}

void Writer::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
}

void Writer::i64(std::int64_t v) {
  const auto u = static_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(u >> (8 * i)));
}

void Writer::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

void Writer::string(std::string_view s) {
  if (s.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(ErrorCode::kMalformedBody, "string longer than 65535 bytes");
  }
  u16(static_cast<std::uint16_t>(s.size()));
  out_.insert(out_.end(), s.begin(), s.end());
}

void Writer::tensor(std::span<const std::int32_t> shape, std::span<const float> data) {
  if (shape.size() > 255) throw Error(ErrorCode::kMalformedBody, "tensor rank above 255");
  std::size_t n = 1;
  for (auto d : shape) {
    if (d < 0) throw Error(ErrorCode::kMalformedBody, "negative tensor dimension");
    n *= static_cast<std::size_t>(d);
  }
  if (n != data.size()) {
    throw Error(ErrorCode::kShapeMismatch, "tensor data does not match its shape");
  }
  u8(static_cast<std::uint8_t>(shape.size()));
  for (auto d : shape) i32(d);
  const std::size_t at = out_.size();
  out_.resize(at + 4 * data.size());
  if constexpr (std::endian::native == std::endian::little) {
    if (!data.empty()) std::memcpy(out_.data() + at, data.data(), 4 * data.size());
  } else {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto bits = std::bit_cast<std::uint32_t>(data[i]);
      for (int b = 0; b < 4; ++b) out_[at + 4 * i + b] = static_cast<std::uint8_t>(bits >> (8 * b));
    }
  }
}

void Writer::tensor(const Tensor& t) { tensor(t.shape, t.data); }

std::span<const std::uint8_t> Reader::take(std::size_t n) {
  if (n > remaining()) {
    throw Error(ErrorCode::kMalformedBody, "body ends " + std::to_string(n - remaining()) +
                                               " bytes early");
  }
  auto s = bytes_.subspan(pos_, n);
  pos_ += n;
  return s;
}

std::uint8_t Reader::u8() { return take(1)[0]; }

std::uint16_t Reader::u16() {
  auto b = take(2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t Reader::u32() {
  auto b = take(4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::int64_t Reader::i64() {
  auto b = take(8);
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return static_cast<std::int64_t>(u);
}

float Reader::f32() { return std::bit_cast<float>(u32()); }

std::string Reader::string() {
  const auto n = u16();
  auto b = take(n);
  return {b.begin(), b.end()};
}

void Reader::require(std::uint64_t count, std::size_t item_size) const {
  if (item_size != 0 && count > remaining() / item_size) {
    throw Error(ErrorCode::kMalformedBody, "declared element count exceeds body");
  }
}

Tensor Reader::tensor() {
  Tensor t;
  const auto rank = u8();
  require(rank, 4);
  t.shape.resize(rank);
  std::uint64_t n = 1;
  for (auto& d : t.shape) {
    d = i32();
    if (d < 0) throw Error(ErrorCode::kMalformedBody, "negative tensor dimension");
    n *= static_cast<std::uint64_t>(d);
    require(n, 4);
  }
  auto b = take(static_cast<std::size_t>(4 * n));
  t.data.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < t.data.size(); ++i) {
    const std::uint32_t bits = static_cast<std::uint32_t>(b[4 * i]) |
                               (static_cast<std::uint32_t>(b[4 * i + 1]) << 8) |
                               (static_cast<std::uint32_t>(b[4 * i + 2]) << 16) |
                               (static_cast<std::uint32_t>(b[4 * i + 3]) << 24);
    t.data[i] = std::bit_cast<float>(bits);
  }
  return t;
}

std::span<const std::uint8_t> Reader::raw(std::size_t n) { return take(n); }

void Reader::expect_end() const {
  if (!done()) {
    throw Error(ErrorCode::kMalformedBody, std::to_string(remaining()) + " trailing bytes");
  }
}

std::string hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (i) s += ' ';
    s += kDigits[bytes[i] >> 4];
    s += kDigits[bytes[i] & 15];
  }
  return s;
}

}  // namespace agentsim::protocol
