#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hsdiff/cube_io.hpp"
#include "hsdiff/errors.hpp"
#include "hsdiff/predictor.hpp"

namespace hsdiff {

namespace detail {

inline void put_u16(std::ostream& os, std::uint16_t v) {
  const char bytes[2] = {static_cast<char>(v & 0xff),
                         static_cast<char>((v >> 8) & 0xff)};
  os.write(bytes, 2);
}

inline bool get_u16(std::istream& is, std::uint16_t& v) {
  unsigned char bytes[2];
  if (!is.read(reinterpret_cast<char*>(bytes), 2)) return false;
  v = static_cast<std::uint16_t>(bytes[0] |
                                 (static_cast<std::uint16_t>(bytes[1]) << 8));
  return true;
}

inline std::map<std::string, std::string> parse_kv_block(
    const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError("weight file: malformed config line: " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

inline long long kv_int(const std::map<std::string, std::string>& kv,
                        const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end())
    throw FormatError("weight file: missing config key: " + key);
  try {
    return std::stoll(it->second);
  } catch (const std::exception&) {
    throw FormatError("weight file: bad integer for key: " + key);
  }
}

}  // namespace detail

// Weight container: magic "TDFW", u16 version, length-prefixed key=value
// config block, then named tensor records (u32 name length + bytes, u32
// rank, dims as u32, f32 payload in column-major order), all little-endian.
inline constexpr char kWeightMagic[4] = {'T', 'D', 'F', 'W'};
inline constexpr std::uint16_t kWeightVersion = 1;

namespace detail {

inline void write_record(std::ostream& os, const std::string& name,
                         const std::vector<std::uint32_t>& dims,
                         const float* data, std::size_t count) {
  put_u32(os, static_cast<std::uint32_t>(name.size()));
  os.write(name.data(), static_cast<std::streamsize>(name.size()));
  put_u32(os, static_cast<std::uint32_t>(dims.size()));
  for (const std::uint32_t d : dims) put_u32(os, d);
  put_f32_block(os, data, count);
}

inline void write_weight_records(
    std::ostream& os, const std::vector<ParamTensor<float>>& params) {
  for (const auto& p : params)
    write_record(os, p.name, p.dims, p.value.data(),
                 static_cast<std::size_t>(p.value.size()));
}

struct WeightRecord {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> payload;
};

// Reads records until EOF; any truncation is a CorruptError.
inline std::vector<WeightRecord> read_weight_records(std::istream& is) {
  std::vector<WeightRecord> records;
  for (;;) {
    std::uint32_t name_len = 0;
    if (!get_u32(is, name_len)) {
      if (is.eof()) break;
      throw CorruptError("weight file: unreadable record header");
    }
    if (name_len == 0 || name_len > 4096)
      throw CorruptError("weight file: implausible record name length");
    WeightRecord rec;
    rec.name.resize(name_len);
    if (!is.read(rec.name.data(), name_len))
      throw CorruptError("weight file: truncated record name");
    std::uint32_t rank = 0;
    if (!get_u32(is, rank) || rank == 0 || rank > 8)
      throw CorruptError("weight file: bad tensor rank");
    rec.dims.resize(rank);
    std::size_t count = 1;
    for (auto& d : rec.dims) {
      if (!get_u32(is, d) || d == 0)
        throw CorruptError("weight file: bad tensor dims");
      count *= d;
    }
    rec.payload.resize(count);
    if (!get_f32_block(is, rec.payload.data(), count))
      throw CorruptError("weight file: truncated tensor payload");
    records.push_back(std::move(rec));
  }
  return records;
}

inline void write_container_header(
    std::ostream& os, const std::map<std::string, std::string>& config) {
  os.write(kWeightMagic, 4);
  put_u16(os, kWeightVersion);
  std::string block;
  for (const auto& [k, v] : config) block += k + "=" + v + "\n";
  put_u32(os, static_cast<std::uint32_t>(block.size()));
  os.write(block.data(), static_cast<std::streamsize>(block.size()));
}

inline void write_weight_container(
    const std::string& path,
    const std::map<std::string, std::string>& config,
    const std::vector<ParamTensor<float>>& params) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  write_container_header(os, config);
  write_weight_records(os, params);
  if (!os) throw IoError("write failed: " + path);
}

struct WeightContainer {
  std::map<std::string, std::string> config;
  std::vector<WeightRecord> records;
};

inline WeightContainer read_weight_container(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kWeightMagic, 4) != 0)
    throw FormatError("not a weight file: " + path);
  std::uint16_t version = 0;
  if (!get_u16(is, version) || version != kWeightVersion)
    throw FormatError("unsupported weight file version");
  std::uint32_t block_len = 0;
  if (!get_u32(is, block_len) || block_len > (1u << 20))
    throw FormatError("weight file: bad config block length");
  std::string block(block_len, '\0');
  if (!is.read(block.data(), block_len))
    throw FormatError("weight file: truncated config block");
  WeightContainer wc;
  wc.config = parse_kv_block(block);
  wc.records = read_weight_records(is);
  return wc;
}

}  // namespace detail

inline std::map<std::string, std::string> config_kv(
    const PredictorConfig& cfg) {
  return {{"bands", std::to_string(cfg.bands)},
          {"base_width", std::to_string(cfg.base_width)},
          {"depth", std::to_string(cfg.depth)},
          {"time_embed_dim", std::to_string(cfg.time_embed_dim)},
          {"seed", std::to_string(cfg.seed)}};
}

inline void save_weights(const NoisePredictor& p, const std::string& path) {
  if (!p.parameters_finite())
    throw ValueError("refusing to save non-finite parameters");
  detail::write_weight_container(path, config_kv(p.config()), p.params());
}

inline NoisePredictor load_weights(const std::string& path) {
  const auto wc = detail::read_weight_container(path);
  PredictorConfig cfg;
  cfg.bands = static_cast<int>(detail::kv_int(wc.config, "bands"));
  cfg.base_width = static_cast<int>(detail::kv_int(wc.config, "base_width"));
  cfg.depth = static_cast<int>(detail::kv_int(wc.config, "depth"));
  cfg.time_embed_dim =
      static_cast<int>(detail::kv_int(wc.config, "time_embed_dim"));
  cfg.seed = static_cast<std::uint64_t>(detail::kv_int(wc.config, "seed"));
  try {
    validate(cfg);
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("weight file: invalid config: ") +
                      e.what());
  }
  NoisePredictor p(cfg);
  auto& params = p.params();
  if (wc.records.size() != params.size())
    throw FormatError("weight file: tensor count does not match config");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& rec = wc.records[i];
    auto& dst = params[i];
    if (rec.name != dst.name || rec.dims != dst.dims)
      throw FormatError("weight file: tensor " + rec.name +
                        " does not match config-derived shape");
    if (rec.payload.size() != static_cast<std::size_t>(dst.value.size()))
      throw FormatError("weight file: tensor size mismatch: " + rec.name);
    std::copy(rec.payload.begin(), rec.payload.end(), dst.value.data());
    if (!dst.value.allFinite())
      throw ValueError("weight file: non-finite values in " + rec.name);
  }
  return p;
}

}  // namespace hsdiff
