#include "agentsim/trainer/checkpoint.hpp"

#include <fstream>
#include <iterator>

#include "agentsim/core/error.hpp"

namespace agentsim::trainer {

using protocol::Reader;
using protocol::Writer;

namespace {

constexpr std::uint8_t kMagic[4] = {'A', 'G', 'N', 'N'};

void write_topology(Writer& w, const Topology& t) {
  w.i32(t.input);
  w.u8(static_cast<std::uint8_t>(t.hidden.size()));
  for (int h : t.hidden) w.i32(h);
  w.u8(static_cast<std::uint8_t>(t.activation));
  w.u8(static_cast<std::uint8_t>(t.branches.size()));
  for (int b : t.branches) w.i32(b);
  w.i32(t.continuous_dim);
  w.u8(t.value_head ? 1 : 0);
  w.i32(t.linear_outputs);
}

Topology read_topology(Reader& r) {
  Topology t;
  t.input = r.i32();
  t.hidden.resize(r.u8());
  for (auto& h : t.hidden) h = r.i32();
  const auto act = r.u8();
  if (act > 1) throw Error(ErrorCode::kMalformedBody, "unknown activation");
  t.activation = static_cast<Activation>(act);
  t.branches.resize(r.u8());
  for (auto& b : t.branches) b = r.i32();
  t.continuous_dim = r.i32();
  t.value_head = r.u8() != 0;
  t.linear_outputs = r.i32();
  auto positive = [](int v) { return v >= 0 && v < (1 << 24); };
  bool ok = t.input > 0 && positive(t.continuous_dim) && positive(t.linear_outputs);
  for (int h : t.hidden) ok = ok && h > 0 && positive(h);
  for (int b : t.branches) ok = ok && b > 0 && positive(b);
  if (!ok || t.output_size() <= 0) throw Error(ErrorCode::kMalformedBody, "invalid topology");
  return t;
}

}  // namespace

protocol::Bytes encode_checkpoint(const Network<float>& net) {
  Writer w;
  w.raw(kMagic);
  w.u16(kCheckpointVersion);
  write_topology(w, net.topology());
  const auto& p = net.params();
  w.u32(static_cast<std::uint32_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) w.f32(p[i]);
  return w.take();
}

Network<float> decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(bytes.begin(), bytes.begin() + 4, kMagic)) {
    throw Error(ErrorCode::kBadMagic, "not a model checkpoint");
  }
  Reader r(bytes.subspan(4));
  const auto version = r.u16();
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kVersionUnsupported, "checkpoint version " + std::to_string(version));
  }
  const Topology t = read_topology(r);
  const auto count = r.u32();
  if (count != t.param_count()) {
    throw Error(ErrorCode::kShapeMismatch, "parameter count does not match topology");
  }
  r.require(count, 4);
  Network<float> net(t);
  for (std::uint32_t i = 0; i < count; ++i) net.params()[i] = r.f32();
  r.expect_end();
  return net;
}

void save_checkpoint(const std::filesystem::path& path, const Network<float>& net) {
  const auto bytes = encode_checkpoint(net);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  std::filesystem::rename(tmp, path);
}

Network<float> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  const protocol::Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace agentsim::trainer
