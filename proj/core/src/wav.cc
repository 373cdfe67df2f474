// core/wav.cc

// Copyright 2026  SDSV Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "sdsv/wav.hh"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace sdsv {

namespace {

std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (b[1] << 8) | (b[2] << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint16_t read_u16(std::istream& is) {
  unsigned char b[2];
  is.read(reinterpret_cast<char*>(b), 2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void write_u32(std::ostream& os, std::uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff),
               static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

void write_u16(std::ostream& os, std::uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  os.write(b, 2);
}

}  // namespace

Waveform read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  SDSV_CHECK(is.good(), "cannot open wav file: " + path);

  char tag[4];
  is.read(tag, 4);
  SDSV_CHECK(std::memcmp(tag, "RIFF", 4) == 0, "not a RIFF file: " + path);
  read_u32(is);  // riff size
  is.read(tag, 4);
  SDSV_CHECK(std::memcmp(tag, "WAVE", 4) == 0, "not a WAVE file: " + path);

  Waveform w;
  std::uint16_t channels = 0, bits = 0;
  bool got_fmt = false;
  while (is.read(tag, 4)) {
    std::uint32_t chunk_size = read_u32(is);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      std::uint16_t fmt = read_u16(is);
      channels = read_u16(is);
      w.sample_rate = static_cast<int>(read_u32(is));
      read_u32(is);  // byte rate
      read_u16(is);  // block align
      bits = read_u16(is);
      SDSV_CHECK(fmt == 1, "only PCM wav supported: " + path);
      SDSV_CHECK(channels == 1, "only mono wav supported: " + path);
      SDSV_CHECK(bits == 16, "only 16-bit wav supported: " + path);
      if (chunk_size > 16) is.seekg(chunk_size - 16, std::ios::cur);
      got_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      SDSV_CHECK(got_fmt, "wav data before fmt chunk: " + path);
      std::size_t n = chunk_size / 2;
      w.samples.resize(n);
      std::vector<char> raw(chunk_size);
      is.read(raw.data(), chunk_size);
      for (std::size_t i = 0; i < n; ++i) {
        std::int16_t s = static_cast<std::int16_t>(
            static_cast<unsigned char>(raw[2 * i]) |
            (static_cast<unsigned char>(raw[2 * i + 1]) << 8));
        w.samples[i] = static_cast<double>(s) / 32768.0;
      }
      return w;
    } else {
      is.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
    }
  }
  throw InputError("wav file has no data chunk: " + path);
}

void write_wav(const std::string& path, const Waveform& w) {
  SDSV_CHECK(w.sample_rate > 0, "sample_rate must be positive");
  std::ofstream os(path, std::ios::binary);
  SDSV_CHECK(os.good(), "cannot write wav file: " + path);

  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(w.samples.size() * 2);
  os.write("RIFF", 4);
  write_u32(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  write_u32(os, 16);
  write_u16(os, 1);  // PCM
  write_u16(os, 1);  // mono
  write_u32(os, static_cast<std::uint32_t>(w.sample_rate));
  write_u32(os, static_cast<std::uint32_t>(w.sample_rate * 2));
  write_u16(os, 2);
  write_u16(os, 16);
  os.write("data", 4);
  write_u32(os, data_bytes);
  for (double x : w.samples) {
    double clipped = std::clamp(x, -1.0, 32767.0 / 32768.0);
    auto s = static_cast<std::int16_t>(std::lrint(clipped * 32768.0));
    write_u16(os, static_cast<std::uint16_t>(s));
  }
}

}  // namespace sdsv
