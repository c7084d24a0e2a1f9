#pragma once

// Binary parameter checkpoint. Layout (little-endian):
//
//   char[8]  magic "DANAECKP"
//   u32      format version (kCheckpointVersion)
//   u64      window length
//   u64      layer count
//   per layer:
//     u32 name length, name bytes
//     u64 in_channels, out_channels, kernel_size, dilation, stride, padding
//     u8  transposed
//     u64 weight count, f64[weight count]
//     u64 bias count,   f64[bias count]

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "danae/errors.hpp"
#include "danae/nn/autodiff.hpp"

namespace danae::nn {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

inline constexpr char kCheckpointMagic[8] = {'D', 'A', 'N', 'A', 'E', 'C', 'K', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedLayer {
  std::string name;
  ConvLayer layer;
};

struct Checkpoint {
  std::uint64_t window_length = 0;
  std::vector<NamedLayer> layers;
};

namespace detail {

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw ParseError("truncated checkpoint '" + path + "'");
  return v;
}

inline void put_array(std::ofstream& out, std::span<const double> a) {
  put<std::uint64_t>(out, a.size());
  out.write(reinterpret_cast<const char*>(a.data()), static_cast<std::streamsize>(a.size() * sizeof(double)));
}

inline void get_array(std::ifstream& in, const std::string& path, Tensor& into) {
  const auto n = get<std::uint64_t>(in, path);
  if (n != into.size()) throw ParseError("checkpoint array size does not match its layer spec in '" + path + "'");
  if (!in.read(reinterpret_cast<char*>(into.values().data()), static_cast<std::streamsize>(n * sizeof(double))))
    throw ParseError("truncated checkpoint '" + path + "'");
}

}  // namespace detail

inline void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  detail::put<std::uint32_t>(out, kCheckpointVersion);
  detail::put<std::uint64_t>(out, ckpt.window_length);
  detail::put<std::uint64_t>(out, ckpt.layers.size());
  for (const auto& [name, layer] : ckpt.layers) {
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    const auto& s = layer.spec;
    for (std::uint64_t v : {s.in_channels, s.out_channels, s.kernel_size, s.dilation, s.stride, s.padding})
      detail::put<std::uint64_t>(out, v);
    detail::put<std::uint8_t>(out, s.transposed ? 1 : 0);
    detail::put_array(out, layer.weight.values());
    detail::put_array(out, layer.bias.values());
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  char magic[sizeof(kCheckpointMagic)] = {};
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw ParseError("'" + path + "' is not a DANAE checkpoint (bad magic)");
  const auto version = detail::get<std::uint32_t>(in, path);
  if (version != kCheckpointVersion)
    throw ParseError("unsupported checkpoint version " + std::to_string(version) + " in '" + path + "'");

  Checkpoint ckpt;
  ckpt.window_length = detail::get<std::uint64_t>(in, path);
  const auto count = detail::get<std::uint64_t>(in, path);
  if (count > 4096) throw ParseError("implausible layer count in '" + path + "'");
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto name_len = detail::get<std::uint32_t>(in, path);
    if (name_len > 256) throw ParseError("implausible layer name length in '" + path + "'");
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) throw ParseError("truncated checkpoint '" + path + "'");
    ConvSpec s;
    s.in_channels = detail::get<std::uint64_t>(in, path);
    s.out_channels = detail::get<std::uint64_t>(in, path);
    s.kernel_size = detail::get<std::uint64_t>(in, path);
    s.dilation = detail::get<std::uint64_t>(in, path);
    s.stride = detail::get<std::uint64_t>(in, path);
    s.padding = detail::get<std::uint64_t>(in, path);
    s.transposed = detail::get<std::uint8_t>(in, path) != 0;
    try {
      s.validate();
    } catch (const ShapeError& e) {
      throw ParseError("invalid layer spec in '" + path + "': " + e.what());
    }
    if (s.in_channels > 1u << 16 || s.out_channels > 1u << 16 || s.kernel_size > 1u << 10)
      throw ParseError("implausible layer dimensions in '" + path + "'");
    ConvLayer layer(s);
    detail::get_array(in, path, layer.weight);
    detail::get_array(in, path, layer.bias);
    ckpt.layers.push_back({std::move(name), std::move(layer)});
  }
  return ckpt;
}

}  // namespace danae::nn
