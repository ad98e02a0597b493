#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "hsdiff/cube.hpp"
#include "hsdiff/cube_io.hpp"

using namespace hsdiff;

namespace {

std::filesystem::path temp_dir() {
  auto d = std::filesystem::temp_directory_path() / "hsdiff_cube_tests";
  std::filesystem::create_directories(d);
  return d;
}

std::vector<unsigned char> read_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, const std::vector<unsigned char>& b) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os.write(reinterpret_cast<const char*>(b.data()),
           static_cast<std::streamsize>(b.size()));
}

HsiCube ramp_cube(int h, int w, int b) {
  HsiCube c(h, w, b);
  for (Eigen::Index i = 0; i < c.size(); ++i)
    c.flat()[i] = static_cast<float>(i) / static_cast<float>(c.size());
  return c;
}

}  // namespace

TEST_CASE("cube construction and band-major indexing") {
  HsiCube c(2, 3, 4);
  CHECK(c.height() == 2);
  CHECK(c.width() == 3);
  CHECK(c.bands() == 4);
  CHECK(c.size() == 24);
  CHECK((c.flat() == 0.0f).all());

  c(1, 2, 3) = 0.5f;
  // band-major, plane row-major: index = b*h*w + r*w + c
  CHECK(c.flat()[3 * 6 + 1 * 3 + 2] == 0.5f);
  c.band(1)(0, 1) = 0.25f;
  CHECK(c.flat()[1 * 6 + 0 * 3 + 1] == 0.25f);
  CHECK(c(0, 1, 1) == 0.25f);

  CHECK_THROWS_AS(HsiCube(0, 3, 4), ArgumentError);
  CHECK_THROWS_AS(HsiCube(2, -1, 4), ArgumentError);
  CHECK_THROWS_AS(HsiCube(2, 3, 0), ArgumentError);
}

TEST_CASE("constant, cast and same_shape") {
  auto c = HsiCube::constant(3, 3, 2, 0.75f);
  CHECK((c.flat() == 0.75f).all());
  auto d = c.cast<double>();
  CHECK(d.height() == 3);
  CHECK((d.flat() == 0.75).all());
  CHECK(c.same_shape(HsiCube(3, 3, 2)));
  CHECK_FALSE(c.same_shape(HsiCube(3, 3, 3)));
  CHECK_THROWS_AS(require_same_shape(c, HsiCube(3, 4, 2), "x"), ArgumentError);
}

TEST_CASE("clamp01 and normalize") {
  HsiCube c(1, 1, 3);
  c.flat() << -0.5f, 0.5f, 1.5f;
  auto k = clamp01(c);
  CHECK(k.flat()[0] == 0.0f);
  CHECK(k.flat()[1] == 0.5f);
  CHECK(k.flat()[2] == 1.0f);

  HsiCube n(1, 1, 3);
  n.flat() << 10.0f, 15.0f, 20.0f;
  auto m = normalize(n, 10.0, 20.0);
  CHECK(m.flat()[0] == doctest::Approx(0.0));
  CHECK(m.flat()[1] == doctest::Approx(0.5));
  CHECK(m.flat()[2] == doctest::Approx(1.0));
  // out-of-range values clamp
  auto mm = normalize(n, 12.0, 18.0);
  CHECK(mm.flat()[0] == 0.0f);
  CHECK(mm.flat()[2] == 1.0f);
  CHECK_THROWS_AS(normalize(n, 5.0, 5.0), ArgumentError);
}

TEST_CASE("minmax_normalize spans exactly [0,1]") {
  auto c = ramp_cube(4, 4, 2);
  c.flat() = c.flat() * 3.0f + 7.0f;
  auto m = minmax_normalize(c);
  CHECK(m.flat().minCoeff() == doctest::Approx(0.0));
  CHECK(m.flat().maxCoeff() == doctest::Approx(1.0));
  CHECK_THROWS_AS(minmax_normalize(HsiCube::constant(2, 2, 2, 0.3f)),
                  ValueError);
}

TEST_CASE("gaussian_cube fills in draw order") {
  Rng a(31);
  auto c = gaussian_cube<float>(2, 3, 2, a);
  Rng b(31);
  for (Eigen::Index i = 0; i < c.size(); ++i)
    CHECK(c.flat()[i] == static_cast<float>(b.gaussian()));
}

TEST_CASE("window_origins tiles while windows fit") {
  CHECK(window_origins(10, 4, 3) == std::vector<int>({0, 3, 6}));
  CHECK(window_origins(64, 32, 32) == std::vector<int>({0, 32}));
  CHECK(window_origins(31, 32, 32).empty());
  CHECK(window_origins(32, 32, 32) == std::vector<int>({0}));
}

TEST_CASE("extract_patches cuts seeded band windows") {
  auto cube = ramp_cube(8, 12, 6);
  PatchSpec spec;
  spec.patch_size = 4;
  spec.stride = 4;
  spec.band_count = 3;
  auto patches = extract_patches(cube, spec, 77);
  REQUIRE(patches.size() == 2u * 3u);  // rows {0,4}, cols {0,4,8}
  for (const auto& p : patches) {
    CHECK(p.height() == 4);
    CHECK(p.width() == 4);
    CHECK(p.bands() == 3);
  }
  // reconstruct the band window choices from the same seed
  Rng rng(77);
  int pi = 0;
  for (int r0 : {0, 4}) {
    for (int c0 : {0, 4, 8}) {
      const int b0 = static_cast<int>(rng.uniform_int(6 - 3 + 1));
      for (int b = 0; b < 3; ++b)
        CHECK((patches[pi].band(b) ==
               cube.band(b0 + b).block(r0, c0, 4, 4))
                  .all());
      ++pi;
    }
  }
  // same seed, same patches; different seed may pick other band windows
  auto again = extract_patches(cube, spec, 77);
  for (std::size_t i = 0; i < patches.size(); ++i)
    CHECK((patches[i].flat() == again[i].flat()).all());
}

TEST_CASE("patch spec validation") {
  auto cube = ramp_cube(8, 8, 4);
  PatchSpec bad;
  bad.patch_size = 16;
  bad.stride = 16;
  bad.band_count = 4;
  CHECK_THROWS_AS(validate_patch_spec(bad, cube), ArgumentError);
  bad.patch_size = 4;
  bad.band_count = 5;
  CHECK_THROWS_AS(validate_patch_spec(bad, cube), ArgumentError);
  bad.band_count = 0;
  CHECK_THROWS_AS(validate_patch_spec(bad, cube), ArgumentError);
  bad.band_count = 4;
  bad.stride = 0;
  CHECK_THROWS_AS(validate_patch_spec(bad, cube), ArgumentError);
}

TEST_CASE("cube file round-trip is bit exact") {
  const auto path = (temp_dir() / "roundtrip.hsc").string();
  auto cube = ramp_cube(5, 7, 3);
  cube.flat()[0] = 0.0f;
  cube.flat()[1] = 1.0f;
  save_cube(cube, path);

  const auto bytes = read_bytes(path);
  REQUIRE(bytes.size() == 16u + 4u * 5u * 7u * 3u);
  CHECK(bytes[0] == 'H');
  CHECK(bytes[1] == 'S');
  CHECK(bytes[2] == 'C');
  CHECK(bytes[3] == '1');
  // little-endian u32 dims: height 5, width 7, bands 3
  CHECK(bytes[4] == 5);
  CHECK(bytes[5] == 0);
  CHECK(bytes[8] == 7);
  CHECK(bytes[12] == 3);

  auto back = load_cube(path);
  REQUIRE(back.same_shape(cube));
  CHECK((back.flat() == cube.flat()).all());
}

TEST_CASE("a 4x4x3 cube survives the round trip") {
  const auto path = (temp_dir() / "small.hsc").string();
  Rng rng(9);
  HsiCube c(4, 4, 3);
  for (Eigen::Index i = 0; i < c.size(); ++i)
    c.flat()[i] = static_cast<float>(rng.uniform());
  save_cube(c, path);
  auto back = load_cube(path);
  CHECK((back.flat() == c.flat()).all());
}

TEST_CASE("cube reader rejects malformed files") {
  const auto dir = temp_dir();
  auto cube = ramp_cube(3, 3, 2);
  const auto good = (dir / "good.hsc").string();
  save_cube(cube, good);
  auto bytes = read_bytes(good);

  CHECK_THROWS_AS(load_cube((dir / "missing.hsc").string()), IoError);

  auto bad_magic = bytes;
  bad_magic[3] = '9';
  write_bytes((dir / "bad_magic.hsc").string(), bad_magic);
  CHECK_THROWS_AS(load_cube((dir / "bad_magic.hsc").string()), FormatError);

  auto short_header = std::vector<unsigned char>(bytes.begin(),
                                                 bytes.begin() + 9);
  write_bytes((dir / "short_header.hsc").string(), short_header);
  CHECK_THROWS_AS(load_cube((dir / "short_header.hsc").string()), FormatError);

  auto zero_dim = bytes;
  zero_dim[4] = zero_dim[5] = zero_dim[6] = zero_dim[7] = 0;
  write_bytes((dir / "zero_dim.hsc").string(), zero_dim);
  CHECK_THROWS_AS(load_cube((dir / "zero_dim.hsc").string()), FormatError);

  auto short_payload = bytes;
  short_payload.resize(bytes.size() - 4);
  write_bytes((dir / "short_payload.hsc").string(), short_payload);
  CHECK_THROWS_AS(load_cube((dir / "short_payload.hsc").string()),
                  CorruptError);

  auto trailing = bytes;
  trailing.push_back(0);
  write_bytes((dir / "trailing.hsc").string(), trailing);
  CHECK_THROWS_AS(load_cube((dir / "trailing.hsc").string()), CorruptError);

  // NaN payload: flip one float to a quiet NaN bit pattern
  auto nan_payload = bytes;
  nan_payload[16] = 0x00;
  nan_payload[17] = 0x00;
  nan_payload[18] = 0xc0;
  nan_payload[19] = 0x7f;
  write_bytes((dir / "nan.hsc").string(), nan_payload);
  CHECK_THROWS_AS(load_cube((dir / "nan.hsc").string()), ValueError);
}

TEST_CASE("cube writer refuses non-finite data") {
  const auto path = (temp_dir() / "nonfinite.hsc").string();
  auto cube = ramp_cube(2, 2, 1);
  cube.flat()[1] = std::numeric_limits<float>::infinity();
  CHECK_THROWS_AS(save_cube(cube, path), ValueError);
}

TEST_CASE("manifest parsing resolves paths and normalization") {
  const auto dir = temp_dir();
  const auto path = (dir / "data.manifest").string();
  {
    std::ofstream os(path);
    os << "# comment line\n";
    os << "\n";
    os << "train\ta.hsc\n";
    os << "train\tsub/b.hsc\n";
    os << "eval\tc.hsc\n";
    os << "normalization\t0.5 2.5\n";
  }
  auto m = load_manifest(path);
  REQUIRE(m.entries.size() == 3);
  CHECK(m.paths("train").size() == 2);
  CHECK(m.paths("eval").size() == 1);
  CHECK(m.paths("train")[0] == (dir / "a.hsc").string());
  CHECK(m.paths("train")[1] == (dir / "sub/b.hsc").string());
  CHECK(m.norm == DatasetManifest::Norm::Fixed);
  CHECK(m.norm_lo == doctest::Approx(0.5));
  CHECK(m.norm_hi == doctest::Approx(2.5));

  {
    std::ofstream os(path);
    os << "train\ta.hsc\nnormalization\tnone\n";
  }
  CHECK(load_manifest(path).norm == DatasetManifest::Norm::None);
  {
    std::ofstream os(path);
    os << "train\ta.hsc\nnormalization\tminmax\n";
  }
  CHECK(load_manifest(path).norm == DatasetManifest::Norm::MinMax);
  {
    std::ofstream os(path);
    os << "train\ta.hsc\n";
  }
  CHECK(load_manifest(path).norm == DatasetManifest::Norm::MinMax);
}

TEST_CASE("manifest parsing rejects malformed lines") {
  const auto dir = temp_dir();
  const auto path = (dir / "bad.manifest").string();
  {
    std::ofstream os(path);
    os << "train a.hsc\n";  // no tab
  }
  CHECK_THROWS_AS(load_manifest(path), FormatError);
  {
    std::ofstream os(path);
    os << "test\ta.hsc\n";  // unknown role
  }
  CHECK_THROWS_AS(load_manifest(path), FormatError);
  {
    std::ofstream os(path);
    os << "normalization\t3 1\n";  // lo >= hi
  }
  CHECK_THROWS_AS(load_manifest(path), FormatError);
  CHECK_THROWS_AS(load_manifest((dir / "absent.manifest").string()), IoError);
}
