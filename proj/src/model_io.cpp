// Copyright 2026 The tsnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tsnn/model_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <zlib.h>

namespace tsnn {
namespace {

constexpr char kMagic[4] = {'T', 'S', 'N', 'N'};
constexpr std::uint32_t kShapeInts = 10;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    out_.append(static_cast<const char*>(p), n);
  }
  void u32(std::uint32_t v) { little(v); }
  void u64(std::uint64_t v) { little(v); }
  void f64(double v) { little(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::string& data() { return out_; }

 private:
  template <typename T>
  void little(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) {
      throw FormatError(FormatError::Code::kTruncated, "model file is truncated");
    }
  }
  std::string_view bytes(std::size_t n) {
    need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint32_t u32() { return little<std::uint32_t>(); }
  std::uint64_t u64() { return little<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(little<std::uint64_t>()); }
  std::string str() { return std::string(bytes(u32())); }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  template <typename T>
  T little() {
    const auto b = bytes(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<unsigned char>(b[i])) << (8 * i);
    }
    return v;
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32_of(std::string_view s) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(s.data()), static_cast<uInt>(s.size()));
  return static_cast<std::uint32_t>(crc);
}

FormatError invalid(const std::string& what) {
  return FormatError(FormatError::Code::kInvalid, "model file: " + what);
}

int to_int(std::uint32_t v) {
  if (v > 1u << 30) throw invalid("dimension out of range");
  return static_cast<int>(v);
}

}  // namespace

std::string save_model(const Model& model) {
  model.net.validate();
  Writer w;
  w.bytes(kMagic, 4);
  w.u32(kModelFormatVersion);
  w.str(model.net.preset);
  w.f64(model.normalization.offset);
  w.f64(model.normalization.scale);
  w.str(model.encoder.to_text());
  w.f64(model.net.z_max);
  w.f64(model.net.epsilon_denom);
  w.u32(static_cast<std::uint32_t>(model.net.input.height));
  w.u32(static_cast<std::uint32_t>(model.net.input.width));
  w.u32(static_cast<std::uint32_t>(model.net.input.channels));
  w.u32(static_cast<std::uint32_t>(model.net.layers.size()));
  for (const auto& l : model.net.layers) {
    w.u32(static_cast<std::uint32_t>(l.kind));
    const int shape[kShapeInts] = {l.in.height,  l.in.width,  l.in.channels,
                                   l.out.height, l.out.width, l.out.channels,
                                   l.kernel,     l.stride,    l.pad_top,
                                   l.pad_left};
    w.u32(kShapeInts);
    for (int v : shape) w.u32(static_cast<std::uint32_t>(v));
    w.u64(static_cast<std::uint64_t>(l.weights.size()));
    for (Eigen::Index i = 0; i < l.weights.size(); ++i) w.f64(l.weights.data()[i]);
  }
  w.u32(crc32_of(w.data()));
  return std::move(w.data());
}

Model load_model(std::string_view bytes) {
  Reader r(bytes);
  if (std::memcmp(bytes.data(), kMagic, std::min<std::size_t>(bytes.size(), 4)) != 0) {
    throw FormatError(FormatError::Code::kBadMagic, "not a model file (bad magic)");
  }
  if (bytes.size() < 4) {
    throw FormatError(FormatError::Code::kTruncated, "model file is truncated");
  }
  r.bytes(4);
  const auto version = r.u32();
  if (version != kModelFormatVersion) {
    throw FormatError(FormatError::Code::kUnsupportedVersion,
                      "unsupported model format version " + std::to_string(version));
  }

  Model m;
  m.net.preset = r.str();
  m.normalization.offset = r.f64();
  m.normalization.scale = r.f64();
  const std::string encoder_text = r.str();
  m.net.z_max = r.f64();
  m.net.epsilon_denom = r.f64();
  m.net.input.height = to_int(r.u32());
  m.net.input.width = to_int(r.u32());
  m.net.input.channels = to_int(r.u32());
  const auto n_layers = r.u32();
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    Layer l;
    const auto kind = r.u32();
    if (kind < 1 || kind > 4) throw invalid("unknown layer kind " + std::to_string(kind));
    l.kind = static_cast<LayerKind>(kind);
    if (r.u32() != kShapeInts) throw invalid("unexpected shape record length");
    int s[kShapeInts];
    for (auto& v : s) v = to_int(r.u32());
    l.in = {s[0], s[1], s[2]};
    l.out = {s[3], s[4], s[5]};
    l.kernel = s[6];
    l.stride = s[7];
    l.pad_top = s[8];
    l.pad_left = s[9];
    const auto count = r.u64();
    if (count > r.remaining() / 8) r.need(r.remaining() + 1);
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    if (l.kind == LayerKind::kDense) {
      rows = l.out.size();
      cols = l.in.size();
    } else if (l.kind == LayerKind::kConv) {
      rows = l.out.channels;
      cols = static_cast<Eigen::Index>(l.kernel) * l.kernel * l.in.channels;
    }
    if (static_cast<std::uint64_t>(rows * cols) != count) {
      throw invalid("weight count does not match layer shape");
    }
    l.weights.resize(rows, cols);
    for (std::uint64_t k = 0; k < count; ++k) l.weights.data()[k] = r.f64();
    m.net.layers.push_back(std::move(l));
  }

  const std::size_t payload = r.pos();
  const auto stored = r.u32();
  if (r.remaining() != 0) throw invalid("trailing bytes after checksum");
  if (stored != crc32_of(bytes.substr(0, payload))) {
    throw FormatError(FormatError::Code::kChecksum, "model file checksum mismatch");
  }

  try {
    m.encoder = EncoderSettings::from_text(encoder_text);
    m.net.validate();
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw invalid(e.what());
  }
  return m;
}

void save_model_file(const Model& model, const std::filesystem::path& path) {
  const auto bytes = save_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

Model load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str());
}

}  // namespace tsnn
