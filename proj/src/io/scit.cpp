// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/io/scit.hpp"

#include <cstring>
#include <fstream>

#include "scisplat/core/errors.hpp"

namespace scisplat {

namespace {

constexpr char kMagic[4] = {'S', 'C', 'I', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
  buf.push_back(static_cast<char>((v >> 16) & 0xff));
  buf.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_scit(const std::string& path, const Tensor& tensor) {
  if (tensor.values.size() != tensor.element_count()) {
    throw ShapeMismatch("tensor payload does not match dims");
  }
  std::string buf;
  buf.reserve(12 + 4 * tensor.dims.size() + 4 * tensor.values.size());
  buf.append(kMagic, 4);
  put_u32(buf, kVersion);
  put_u32(buf, static_cast<std::uint32_t>(tensor.dims.size()));
  for (std::uint32_t d : tensor.dims) put_u32(buf, d);
  for (float v : tensor.values) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(buf, bits);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileFormatError("cannot open for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw FileFormatError("short write: " + path);
}

Tensor read_scit(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileFormatError("cannot open: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
  if (buf.size() < 12 || std::memcmp(p, kMagic, 4) != 0) {
    throw FileFormatError("bad SCIT magic: " + path);
  }
  if (get_u32(p + 4) != kVersion) throw FileFormatError("unsupported SCIT version: " + path);
  const std::uint32_t ndim = get_u32(p + 8);
  if (ndim > 8) throw FileFormatError("implausible SCIT rank: " + path);
  if (buf.size() < 12 + 4ull * ndim) throw FileFormatError("truncated SCIT header: " + path);

  Tensor t;
  t.dims.resize(ndim);
  for (std::uint32_t i = 0; i < ndim; ++i) t.dims[i] = get_u32(p + 12 + 4 * i);
  const std::size_t count = t.element_count();
  const std::size_t payload_at = 12 + 4ull * ndim;
  if (buf.size() != payload_at + 4 * count) throw FileFormatError("bad SCIT payload size: " + path);
  t.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t bits = get_u32(p + payload_at + 4 * i);
    std::memcpy(&t.values[i], &bits, 4);
  }
  return t;
}

Tensor tensor_from_image(const ImagePlane& image) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(image.height), static_cast<std::uint32_t>(image.width),
            static_cast<std::uint32_t>(image.channels)};
  t.values.assign(image.data.begin(), image.data.end());
  return t;
}

ImagePlane image_from_tensor(const Tensor& tensor) {
  if (tensor.dims.size() != 3) throw FileFormatError("image tensor must have rank 3");
  ImagePlane img(static_cast<int>(tensor.dims[0]), static_cast<int>(tensor.dims[1]),
                 static_cast<int>(tensor.dims[2]));
  img.data.assign(tensor.values.begin(), tensor.values.end());
  return img;
}

Tensor tensor_from_masks(const MaskStack& masks) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(masks.n_frames), static_cast<std::uint32_t>(masks.height),
            static_cast<std::uint32_t>(masks.width)};
  t.values.assign(masks.values.begin(), masks.values.end());
  return t;
}

MaskStack masks_from_tensor(const Tensor& tensor) {
  if (tensor.dims.size() != 3) throw FileFormatError("mask tensor must have rank 3");
  MaskStack m;
  m.n_frames = static_cast<int>(tensor.dims[0]);
  m.height = static_cast<int>(tensor.dims[1]);
  m.width = static_cast<int>(tensor.dims[2]);
  m.values.assign(tensor.values.begin(), tensor.values.end());
  return m;
}

}  // namespace scisplat
