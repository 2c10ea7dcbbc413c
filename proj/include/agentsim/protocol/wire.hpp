#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace agentsim::protocol {

using Bytes = std::vector<std::uint8_t>;

// Row-major f32 tensor with i32 dims.
struct Tensor {
  std::vector<std::int32_t> shape;
  std::vector<float> data;

  bool operator==(const Tensor&) const = default;
};

// Little-endian appender for the wire encodings.
class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void i64(std::int64_t v);
  void f32(float v);
  // u16 length + UTF-8 bytes; longer strings are rejected.
  void string(std::string_view s);
  // u8 rank + i32 dims + f32 data.
  void tensor(const Tensor& t);
  void tensor(std::span<const std::int32_t> shape, std::span<const float> data);
  void raw(std::span<const std::uint8_t> bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }

  Bytes& bytes() { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

// Bounds-checked reader. Running past the end raises MalformedBody, since
// frame truncation is detected before a body is ever parsed.
class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::int64_t i64();
  float f32();
  std::string string();
  Tensor tensor();
  std::span<const std::uint8_t> raw(std::size_t n);
  std::span<const std::uint8_t> rest() { return raw(remaining()); }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  bool done() const { return pos_ == bytes_.size(); }
  // Raises MalformedBody when bytes are left over.
  void expect_end() const;
  // Raises MalformedBody unless `count` items of `item_size` bytes can still fit.
  void require(std::uint64_t count, std::size_t item_size) const;

 private:
  std::span<const std::uint8_t> take(std::size_t n);

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::string hex(std::span<const std::uint8_t> bytes);

}  // namespace agentsim::protocol
