#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hsdiff/cube.hpp"
#include "hsdiff/errors.hpp"

namespace hsdiff {

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {
      static_cast<unsigned char>(v & 0xff),
      static_cast<unsigned char>((v >> 8) & 0xff),
      static_cast<unsigned char>((v >> 16) & 0xff),
      static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline bool get_u32(std::istream& is, std::uint32_t& v) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) return false;
  v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
      (static_cast<std::uint32_t>(b[2]) << 16) |
      (static_cast<std::uint32_t>(b[3]) << 24);
  return true;
}

inline void put_f32(std::ostream& os, float f) {
  put_u32(os, std::bit_cast<std::uint32_t>(f));
}

inline bool get_f32(std::istream& is, float& f) {
  std::uint32_t v;
  if (!get_u32(is, v)) return false;
  f = std::bit_cast<float>(v);
  return true;
}

// Bulk little-endian f32 payload. Byte-identical to element-wise put_f32;
// the bulk path just skips per-element byte shuffling on LE hosts.
inline void put_f32_block(std::ostream& os, const float* data,
                          std::size_t count) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(data),
             static_cast<std::streamsize>(count * sizeof(float)));
  } else {
    for (std::size_t i = 0; i < count; ++i) put_f32(os, data[i]);
  }
}

inline bool get_f32_block(std::istream& is, float* data, std::size_t count) {
  if constexpr (std::endian::native == std::endian::little) {
    return static_cast<bool>(
        is.read(reinterpret_cast<char*>(data),
                static_cast<std::streamsize>(count * sizeof(float))));
  } else {
    for (std::size_t i = 0; i < count; ++i)
      if (!get_f32(is, data[i])) return false;
    return true;
  }
}

}  // namespace detail

// HSC container: magic "HSC1", u32 LE height/width/bands, then
// height*width*bands IEEE-754 binary32 LE scalars in band-major order.
inline constexpr char kHscMagic[4] = {'H', 'S', 'C', '1'};

inline void save_cube(const HsiCube& cube, const std::string& path) {
  if (cube.size() == 0) throw ArgumentError("save_cube: empty cube");
  if (!cube.all_finite())
    throw ValueError("save_cube: cube contains non-finite values");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("save_cube: cannot open " + path);
  os.write(kHscMagic, 4);
  detail::put_u32(os, static_cast<std::uint32_t>(cube.height()));
  detail::put_u32(os, static_cast<std::uint32_t>(cube.width()));
  detail::put_u32(os, static_cast<std::uint32_t>(cube.bands()));
  detail::put_f32_block(os, cube.flat().data(),
                        static_cast<std::size_t>(cube.size()));
  if (!os) throw IoError("save_cube: write failed for " + path);
}

inline HsiCube load_cube(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("load_cube: cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kHscMagic, 4) != 0)
    throw FormatError("load_cube: bad magic in " + path);
  std::uint32_t h = 0, w = 0, b = 0;
  if (!detail::get_u32(is, h) || !detail::get_u32(is, w) ||
      !detail::get_u32(is, b))
    throw FormatError("load_cube: truncated header in " + path);
  if (h < 1 || w < 1 || b < 1)
    throw FormatError("load_cube: zero dimension in " + path);
  HsiCube cube(static_cast<int>(h), static_cast<int>(w), static_cast<int>(b));
  if (!detail::get_f32_block(is, cube.flat().data(),
                             static_cast<std::size_t>(cube.size())))
    throw CorruptError("load_cube: payload shorter than header claims in " +
                       path);
  is.peek();
  if (!is.eof())
    throw CorruptError("load_cube: trailing bytes after payload in " + path);
  if (!cube.all_finite())
    throw ValueError("load_cube: non-finite payload in " + path);
  return cube;
}

// Dataset manifest: UTF-8 text, one "role<TAB>path" line per entry with role
// in {train, eval}, '#' comments. An optional "normalization<TAB>..." line
// selects the bounds rule: "minmax" (default, min/max over the train split),
// "none", or "<lo> <hi>" fixed bounds. Entry paths are resolved relative to
// the manifest's directory.
struct ManifestEntry {
  std::string role;
  std::string path;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  enum class Norm { MinMax, None, Fixed } norm = Norm::MinMax;
  double norm_lo = 0.0;
  double norm_hi = 1.0;

  std::vector<std::string> paths(const std::string& role) const {
    std::vector<std::string> out;
    for (const auto& e : entries)
      if (e.role == role) out.push_back(e.path);
    return out;
  }
};

inline DatasetManifest load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("load_manifest: cannot open " + path);
  const auto base = std::filesystem::path(path).parent_path();
  DatasetManifest m;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw FormatError("manifest line " + std::to_string(lineno) +
                        ": expected role<TAB>path");
    const std::string role = line.substr(0, tab);
    const std::string rest = line.substr(tab + 1);
    if (role == "train" || role == "eval") {
      m.entries.push_back({role, (base / rest).string()});
    } else if (role == "normalization") {
      if (rest == "minmax") {
        m.norm = DatasetManifest::Norm::MinMax;
      } else if (rest == "none") {
        m.norm = DatasetManifest::Norm::None;
      } else {
        double lo = 0, hi = 0;
        if (std::sscanf(rest.c_str(), "%lf %lf", &lo, &hi) != 2 || !(lo < hi))
          throw FormatError("manifest line " + std::to_string(lineno) +
                            ": bad normalization spec");
        m.norm = DatasetManifest::Norm::Fixed;
        m.norm_lo = lo;
        m.norm_hi = hi;
      }
    } else {
      throw FormatError("manifest line " + std::to_string(lineno) +
                        ": unknown role '" + role + "'");
    }
  }
  return m;
}

}  // namespace hsdiff
