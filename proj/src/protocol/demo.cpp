#include "agentsim/protocol/demo.hpp"

#include <fstream>
#include <iterator>

#include "agentsim/core/error.hpp"
#include "agentsim/protocol/messages.hpp"

namespace agentsim::protocol {

namespace {

constexpr std::uint8_t kMagic[4] = {'A', 'G', 'D', 'M'};

std::vector<std::int32_t> action_shape(const kernel::ActionSpec& spec) {
  return {static_cast<std::int32_t>(spec.width())};
}

void check_record(const kernel::BehaviorSpec& spec, const DemoRecord& rec, std::size_t index) {
  const auto where = " in record " + std::to_string(index);
  if (rec.observations.size() != spec.observations.size()) {
    throw Error(ErrorCode::kShapeMismatch, "observation count differs from spec" + where);
  }
  for (std::size_t i = 0; i < rec.observations.size(); ++i) {
    if (rec.observations[i].size() != spec.observations[i].size()) {
      throw Error(ErrorCode::kShapeMismatch, "observation " + std::to_string(i) +
                                                 " size differs from spec" + where);
    }
  }
  if (rec.action.size() != spec.action.width()) {
    throw Error(ErrorCode::kShapeMismatch, "action width differs from spec" + where);
  }
}

}  // namespace

std::vector<std::int32_t> stored_shape(const kernel::ObservationSpec& spec) {
  std::vector<std::int32_t> shape;
  if (spec.stack > 1) shape.push_back(spec.stack);
  shape.insert(shape.end(), spec.shape.begin(), spec.shape.end());
  return shape;
}

Bytes encode_demo(const DemoFile& demo) {
  Writer w;
  w.raw(kMagic);
  w.u16(demo.version);
  write_behavior_spec(w, demo.spec);
  w.u32(static_cast<std::uint32_t>(demo.records.size()));
  std::vector<std::vector<std::int32_t>> shapes;
  for (const auto& o : demo.spec.observations) shapes.push_back(stored_shape(o));
  const auto ashape = action_shape(demo.spec.action);
  for (std::size_t k = 0; k < demo.records.size(); ++k) {
    const auto& rec = demo.records[k];
    check_record(demo.spec, rec, k);
    for (std::size_t i = 0; i < rec.observations.size(); ++i) w.tensor(shapes[i], rec.observations[i]);
    w.tensor(ashape, rec.action);
    w.f32(rec.reward);
    w.u8(rec.done ? 1 : 0);
    w.u8(rec.interrupted ? 1 : 0);
  }
  return w.take();
}

DemoFile decode_demo(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(bytes.begin(), bytes.begin() + 4, kMagic)) {
    throw Error(ErrorCode::kBadMagic, "not a demonstration file");
  }
  Reader r(bytes.subspan(4));
  DemoFile demo;
  demo.version = r.u16();
  if (demo.version != kDemoVersion) {
    throw Error(ErrorCode::kVersionUnsupported,
                "demo format version " + std::to_string(demo.version));
  }
  demo.spec = read_behavior_spec(r);
  std::vector<std::vector<std::int32_t>> shapes;
  for (const auto& o : demo.spec.observations) shapes.push_back(stored_shape(o));
  const auto ashape = action_shape(demo.spec.action);
  const auto count = r.u32();
  // Smallest possible record: rank bytes plus reward and flags.
  r.require(count, demo.spec.observations.size() + 7);
  demo.records.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    DemoRecord rec;
    for (const auto& shape : shapes) {
      Tensor t = r.tensor();
      if (t.shape != shape) {
        throw Error(ErrorCode::kShapeMismatch,
                    "observation shape differs from spec in record " + std::to_string(k));
      }
      rec.observations.push_back(std::move(t.data));
    }
    Tensor a = r.tensor();
    if (a.shape != ashape) {
      throw Error(ErrorCode::kShapeMismatch,
                  "action shape differs from spec in record " + std::to_string(k));
    }
    rec.action = std::move(a.data);
    rec.reward = r.f32();
    rec.done = r.u8() != 0;
    rec.interrupted = r.u8() != 0;
    demo.records.push_back(std::move(rec));
  }
  r.expect_end();
  return demo;
}

void write_demo(const std::filesystem::path& path, const kernel::BehaviorSpec& spec,
                const std::vector<DemoRecord>& records) {
  DemoFile demo{kDemoVersion, spec, records};
  const Bytes bytes = encode_demo(demo);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

DemoFile read_demo(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  const Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_demo(bytes);
}

std::size_t episode_count(const DemoFile& demo) {
  std::size_t n = 0;
  for (const auto& r : demo.records) n += r.done ? 1 : 0;
  return n;
}

}  // namespace agentsim::protocol
