// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/io/png.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "scisplat/core/errors.hpp"

namespace scisplat {

namespace {

void put_u32be(std::string& buf, std::uint32_t v) {
  buf.push_back(static_cast<char>((v >> 24) & 0xff));
  buf.push_back(static_cast<char>((v >> 16) & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
  buf.push_back(static_cast<char>(v & 0xff));
}

void append_chunk(std::string& out, const char type[4], const std::string& payload) {
  put_u32be(out, static_cast<std::uint32_t>(payload.size()));
  const std::size_t crc_start = out.size();
  out.append(type, 4);
  out.append(payload);
  const auto* crc_data = reinterpret_cast<const Bytef*>(out.data() + crc_start);
  const uLong crc = crc32(0L, crc_data, static_cast<uInt>(out.size() - crc_start));
  put_u32be(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

void write_png(const std::string& path, const ImagePlane& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw InvalidSpec("png preview supports 1 or 3 channels");
  }
  const int h = image.height;
  const int w = image.width;
  const int ch = image.channels;

  // Filter byte 0 per scanline, then 8-bit samples.
  std::vector<unsigned char> raw(static_cast<std::size_t>(h) * (1 + static_cast<std::size_t>(w) * ch));
  std::size_t k = 0;
  for (int y = 0; y < h; ++y) {
    raw[k++] = 0;
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        const double v = std::clamp(image.at(y, x, c), 0.0, 1.0);
        raw[k++] = static_cast<unsigned char>(std::lround(v * 255.0));
      }
    }
  }

  uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> compressed(compressed_size);
  if (compress2(compressed.data(), &compressed_size, raw.data(), static_cast<uLong>(raw.size()),
                Z_BEST_SPEED) != Z_OK) {
    throw FileFormatError("zlib compression failed for " + path);
  }

  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_u32be(ihdr, static_cast<std::uint32_t>(w));
  put_u32be(ihdr, static_cast<std::uint32_t>(h));
  ihdr.push_back(8);                        // bit depth
  ihdr.push_back(ch == 1 ? 0 : 2);          // color type: gray or truecolor
  ihdr.push_back(0);                        // compression
  ihdr.push_back(0);                        // filter
  ihdr.push_back(0);                        // interlace
  append_chunk(out, "IHDR", ihdr);
  append_chunk(out, "IDAT",
               std::string(reinterpret_cast<char*>(compressed.data()), compressed_size));
  append_chunk(out, "IEND", "");

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FileFormatError("cannot open for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw FileFormatError("short write: " + path);
}

}  // namespace scisplat
