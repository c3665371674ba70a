#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "llc/common.hpp"

using namespace llc;

TEST_CASE("warning log keeps exact counts and caps retained messages") {
  WarningLog log;
  CHECK(log.empty());
  for (int i = 0; i < 25; ++i) log.add("code_a", "message " + std::to_string(i));
  log.add("code_b", "one off");
  CHECK(log.count("code_a") == 25);
  CHECK(log.count("code_b") == 1);
  CHECK(log.count("missing") == 0);
  CHECK(log.total() == 26);
  CHECK(log.messages("code_a").size() == WarningLog::kMaxRetainedPerCode);
  CHECK(log.messages("code_a").front() == "message 0");
  auto counts = log.counts();
  CHECK(counts.size() == 2);
  CHECK(counts["code_a"] == 25);
  auto all = log.all_messages();
  // 20 retained + "... and 5 more" + 1 for code_b
  CHECK(all.size() == 22);
  CHECK_FALSE(log.empty());
}

TEST_CASE("fnv1a64 matches published vectors") {
  CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cull);
  CHECK(to_hex(0xcbf29ce484222325ull) == "cbf29ce484222325");
  CHECK(to_hex(0) == "0000000000000000");
}

TEST_CASE("format_sig6 gives six significant digits") {
  CHECK(format_sig6(0.32) == "0.32");
  CHECK(format_sig6(3.0) == "3");
  CHECK(format_sig6(1234567.0) == "1.23457e+06");
  CHECK(format_sig6(0.000123456789) == "0.000123457");
  CHECK(format_sig6(-2.5) == "-2.5");
}

TEST_CASE("format_fixed emits the requested number of decimals") {
  CHECK(format_fixed(74.4, 1) == "74.4");
  CHECK(format_fixed(8.25, 2) == "8.25");
  CHECK(format_fixed(0.0, 2) == "0.00");
  CHECK(format_fixed(100.0, 1) == "100.0");
}

TEST_CASE("round_decimals rounds half away from zero") {
  CHECK(round_decimals(2.5, 0) == 3.0);
  CHECK(round_decimals(-2.5, 0) == -3.0);
  CHECK(round_decimals(0.125, 2) == doctest::Approx(0.13).epsilon(1e-12));
  CHECK(round_decimals(-0.125, 2) == doctest::Approx(-0.13).epsilon(1e-12));
  CHECK(round_decimals(74.36708, 1) == doctest::Approx(74.4).epsilon(1e-12));
}

TEST_CASE("format_shortest round-trips doubles and normalizes negative zero") {
  CHECK(format_shortest(0.1) == "0.1");
  CHECK(format_shortest(-0.0) == "0");
  CHECK(format_shortest(2.0) == "2");
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    const double v = std::ldexp(static_cast<double>(rng()) - 9.2e18, -static_cast<int>(rng() % 40));
    const std::string s = format_shortest(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("parallel_for covers every index once regardless of job count") {
  for (unsigned jobs : {1u, 2u, 4u, 7u}) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), jobs, [&](std::size_t i) { hits[i]++; });
    for (int h : hits) CHECK(h == 1);
  }
  parallel_for(0, 4, [&](std::size_t) { FAIL("must not be called"); });
}

TEST_CASE("parallel_for propagates worker exceptions") {
  CHECK_THROWS_AS(
      parallel_for(100, 4,
                   [](std::size_t i) {
                     if (i == 57) throw ValidationError("boom");
                   }),
      ValidationError);
  CHECK(default_jobs() >= 1);
}
