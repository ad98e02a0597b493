#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "hsdiff/config.hpp"

using namespace hsdiff;

namespace {

std::filesystem::path temp_dir() {
  auto d = std::filesystem::temp_directory_path() / "hsdiff_config_tests";
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("declared keys carry defaults, undeclared keys are rejected") {
  KvConfig cfg;
  cfg.declare("train.steps", "1000");
  CHECK(cfg.has("train.steps"));
  CHECK_FALSE(cfg.has("train.step"));
  CHECK(cfg.get("train.steps") == "1000");
  CHECK(cfg.get_int("train.steps") == 1000);
  cfg.set("train.steps", "50");
  CHECK(cfg.get_int("train.steps") == 50);
  CHECK_THROWS_AS(cfg.set("train.step", "50"), ArgumentError);
  CHECK_THROWS_AS(cfg.get("nope"), ArgumentError);
}

TEST_CASE("typed getters parse strictly") {
  KvConfig cfg;
  cfg.declare("a", "12");
  cfg.declare("b", "0.25");
  cfg.declare("c", "true");
  cfg.declare("d", "0");
  cfg.declare("bad", "12x");
  cfg.declare("seed", "18446744073709551615");
  CHECK(cfg.get_int("a") == 12);
  CHECK(cfg.get_double("b") == doctest::Approx(0.25));
  CHECK(cfg.get_bool("c"));
  CHECK_FALSE(cfg.get_bool("d"));
  CHECK(cfg.get_u64("seed") == 18446744073709551615ull);
  CHECK_THROWS_AS(cfg.get_int("bad"), ArgumentError);
  CHECK_THROWS_AS(cfg.get_bool("a"), ArgumentError);
  cfg.set("c", "yes");
  CHECK_THROWS_AS(cfg.get_bool("c"), ArgumentError);
}

TEST_CASE("config files override defaults, flags override files") {
  const auto path = (temp_dir() / "run.cfg").string();
  {
    std::ofstream os(path);
    os << "# a comment\n";
    os << "\n";
    os << "  lr = 0.01  \n";
    os << "steps=200\n";
  }
  KvConfig cfg;
  cfg.declare("lr", "0.0001");
  cfg.declare("steps", "1000");
  cfg.declare("untouched", "7");
  cfg.apply_file(path);
  CHECK(cfg.get_double("lr") == doctest::Approx(0.01));
  CHECK(cfg.get_int("steps") == 200);
  CHECK(cfg.get_int("untouched") == 7);
  // a later set() (the flag path) wins over the file
  cfg.set("lr", "0.5");
  CHECK(cfg.get_double("lr") == doctest::Approx(0.5));
}

TEST_CASE("config file errors carry the offending location") {
  const auto dir = temp_dir();
  const auto no_eq = (dir / "noeq.cfg").string();
  {
    std::ofstream os(no_eq);
    os << "lr 0.01\n";
  }
  KvConfig cfg;
  cfg.declare("lr", "0.0001");
  try {
    cfg.apply_file(no_eq);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find(":1") != std::string::npos);
  }
  const auto unknown = (dir / "unknown.cfg").string();
  {
    std::ofstream os(unknown);
    os << "mystery=1\n";
  }
  CHECK_THROWS_AS(cfg.apply_file(unknown), ArgumentError);
  CHECK_THROWS_AS(cfg.apply_file((dir / "absent.cfg").string()), IoError);
}

TEST_CASE("snapshots round-trip the full configuration") {
  const auto path = (temp_dir() / "snap.cfg").string();
  KvConfig cfg;
  cfg.declare("z.key", "3");
  cfg.declare("a.key", "hello world");
  cfg.declare("m.key", "0.125");
  cfg.set("z.key", "9");
  cfg.write_snapshot(path);

  // lines come out sorted by key
  std::ifstream is(path);
  std::string l1, l2, l3;
  std::getline(is, l1);
  std::getline(is, l2);
  std::getline(is, l3);
  CHECK(l1 == "a.key=hello world");
  CHECK(l2 == "m.key=0.125");
  CHECK(l3 == "z.key=9");

  KvConfig back;
  back.declare("z.key", "");
  back.declare("a.key", "");
  back.declare("m.key", "");
  back.apply_file(path);
  CHECK(back.values() == cfg.values());
}
