#include <string>

#include "doctest.h"
#include "harnacklab/config.hpp"

using namespace hlab;
using config::KeyValues;

namespace {

std::string error_of(const std::string& text) {
  try {
    KeyValues::parse_text(text, "run.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("comments, blanks and whitespace") {
  auto kv = KeyValues::parse_text("# header\n\n  a = 1.5  \nname=box # trailing\nflag = true\nlist = 1, 2 ,3\n");
  CHECK(kv.get_double("a", 0) == 1.5);
  CHECK(kv.get_string("name", "") == "box");
  CHECK(kv.get_bool("flag", false));
  CHECK(kv.get_list("list", {}) == std::vector<std::string>{"1", "2", "3"});
  CHECK(kv.get_int("missing", 7) == 7);
  CHECK_FALSE(kv.has("missing"));
}

TEST_CASE("parse errors carry the line number") {
  CHECK(error_of("a = 1\nnot a pair\n").rfind("run.cfg:2:", 0) == 0);
  CHECK(error_of("a = 1\n= 3\n").rfind("run.cfg:2:", 0) == 0);
  std::string dup = error_of("a = 1\nb = 2\na = 3\n");
  CHECK(dup.rfind("run.cfg:3:", 0) == 0);
  CHECK(dup.find("duplicate") != std::string::npos);
  CHECK(error_of("a = 1\n").empty());
}

TEST_CASE("typed getters report the key and its line") {
  auto kv = KeyValues::parse_text("x = 1\nseed = -4\nratio = abc\n", "run.cfg");
  try {
    kv.get_double("ratio", 0.0);
    FAIL("no throw");
  } catch (const ConfigError& e) {
    std::string m = e.what();
    CHECK(m.find("run.cfg:3") != std::string::npos);
    CHECK(m.find("ratio") != std::string::npos);
  }
  CHECK_THROWS_AS(kv.get_u64("seed", 0), ConfigError);
  CHECK(kv.get_int("seed", 0) == -4);
  CHECK_THROWS_AS(kv.get_bool("x", false) && kv.get_bool("ratio", false), ConfigError);
}

TEST_CASE("unknown keys") {
  auto kv = KeyValues::parse_text("grid = 65x65\ngird = 9x9\n");
  CHECK_THROWS_WITH_AS(kv.require_known({"grid"}), doctest::Contains("gird"), ConfigError);
  CHECK_NOTHROW(kv.require_known({"grid", "gird"}));
}

TEST_CASE("overrides replace file values") {
  auto kv = KeyValues::parse_text("seed = 1\n");
  kv.set("seed", "9");
  CHECK(kv.get_u64("seed", 0) == 9);
}

TEST_CASE("grid and window strings") {
  CHECK(config::parse_grid("129x65") == std::pair<int, int>{129, 65});
  CHECK_THROWS_AS(config::parse_grid("129"), ConfigError);
  CHECK_THROWS_AS(config::parse_grid("8x65"), ConfigError);
  CHECK_THROWS_AS(config::parse_grid("65x6.5"), ConfigError);
  auto w = config::parse_window("-2,2,-1,3");
  CHECK(w.lo == Point2{-2, -1});
  CHECK(w.hi == Point2{2, 3});
  CHECK_THROWS_AS(config::parse_window("1,0,0,1"), ConfigError);
  CHECK_THROWS_AS(config::parse_window("0,1,0"), ConfigError);
  CHECK_THROWS_AS(config::parse_window("0,1,a,1"), ConfigError);
}

TEST_CASE("missing file") { CHECK_THROWS_AS(KeyValues::load("/nonexistent/run.cfg"), ConfigError); }
