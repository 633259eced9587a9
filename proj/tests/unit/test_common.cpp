#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <set>

#include "lift/common/error.hpp"
#include "lift/common/seed.hpp"
#include "lift/common/textio.hpp"
#include "lift/common/types.hpp"

using namespace lift;

TEST_CASE("derived seeds depend only on master and path") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
  CHECK(derive_seed(1, {2}) != derive_seed(1, {2, 0}));

  std::set<std::uint64_t> seen;
  for (std::uint64_t fold = 0; fold < 64; ++fold) seen.insert(derive_seed(7, {tag("init"), fold}));
  CHECK(seen.size() == 64);
}

TEST_CASE("tag is FNV-1a") {
  // Published FNV-1a 64 test vectors.
  CHECK(tag("") == 0xcbf29ce484222325ull);
  CHECK(tag("a") == 0xaf63dc4c8601ec8cull);
  CHECK(digest_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(3.0) == "3");
}

TEST_CASE("strict number parsing") {
  CHECK(parse_int("42") == 42);
  CHECK(parse_int("-7") == -7);
  CHECK_THROWS_AS(parse_int("4x"), Error);
  CHECK_THROWS_AS(parse_double(""), Error);
  CHECK(parse_double(" 1.5 ") == 1.5);
  CHECK_THROWS_AS(parse_double("1.5 x"), Error);
  try {
    parse_double("nope", "BadThing");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == "BadThing");
    CHECK(e.category() == ErrorCategory::Data);
  }
}

TEST_CASE("split and trim") {
  const auto parts = split("a,,b", ',');
  REQUIRE(parts.size() == 3);
  CHECK(parts[0] == "a");
  CHECK(parts[1].empty());
  CHECK(parts[2] == "b");
  CHECK(trim("  x y \r") == "x y");
}

TEST_CASE("exit codes by category") {
  CHECK(exit_code_for(ErrorCategory::Config) == 2);
  CHECK(exit_code_for(ErrorCategory::Data) == 3);
  CHECK(exit_code_for(ErrorCategory::Numeric) == 4);
}

TEST_CASE("views and pipelines parse back") {
  for (ViewId v : kAllViews) CHECK(parse_view(to_string(v)) == v);
  for (Pipeline p : {Pipeline::GdDv2, Pipeline::GdSamDv2}) CHECK(parse_pipeline(to_string(p)) == p);
  CHECK(variant_name(Pipeline::GdDv2) == "detect");
  CHECK(variant_name(Pipeline::GdSamDv2) == "segment");
  CHECK_THROWS_AS(parse_view("V4"), Error);
}

TEST_CASE("write_file creates parents and read_file returns the bytes") {
  const auto dir = std::filesystem::temp_directory_path() / "lift_test_common";
  std::filesystem::remove_all(dir);
  const std::string bytes("a\0b\nc", 5);
  write_file(dir / "x" / "y.bin", bytes);
  CHECK(read_file(dir / "x" / "y.bin") == bytes);
  try {
    read_file(dir / "missing");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == "MissingArtifact");
  }
  std::filesystem::remove_all(dir);
}
