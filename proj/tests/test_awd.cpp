// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

#include "doctest.h"

#include "attnorigin/awd.hpp"

using namespace attnorigin;
using namespace attnorigin::awd;

namespace {

AlignedAwd aligned_from(const std::vector<std::vector<double>>& rows) {
  AlignedAwd a;
  a.steps = static_cast<int>(rows.size());
  a.layers = 1;
  a.heads = 1;
  a.units = static_cast<int>(rows.front().size());
  for (const auto& r : rows) a.values.insert(a.values.end(), r.begin(), r.end());
  return a;
}

AlignedAwd random_aligned(std::mt19937& rng, int steps, int layers, int heads, int units) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  AlignedAwd a{steps, layers, heads, units, {}};
  for (int i = 0; i < steps * layers * heads; ++i) {
    std::vector<double> row(static_cast<std::size_t>(units));
    double z = 0.0;
    for (double& v : row) z += (v = u(rng));
    for (double& v : row) a.values.push_back(v / z);
  }
  return a;
}

}  // namespace

TEST_CASE("beam_decode_awd follows parent links") {
  // 2 beams, 3 steps, 1 layer, 1 head, 1 unit; value = 10*beam + step.
  AwdTensor t(2, 3, 1, 1, 1);
  for (int b = 0; b < 2; ++b) {
    for (int s = 0; s < 3; ++s) t.slice(b, s, 0, 0)[0] = static_cast<float>(10 * b + s);
  }
  // Winner ends in slot 1 at step 2 via parent 1; at step 1 slot 1 came from slot 0.
  const BeamTrace trace{{0, 0}, {0, 0}, {0, 1}};
  const auto a = beam_decode_awd(t, trace, 1, 3);
  CHECK(a.values == std::vector<double>{0.0, 1.0, 12.0});

  const auto short_hyp = beam_decode_awd(t, trace, 0, 2);
  CHECK(short_hyp.steps == 2);

  CHECK_THROWS_AS(beam_decode_awd(t, BeamTrace{{-1, 0}, {0, 0}, {0, 1}}, 1, 3), InvalidArgument);
  CHECK_THROWS_AS(beam_decode_awd(t, BeamTrace{{0, 0}, {0, 0}, {0, 5}}, 1, 3), InvalidArgument);
  CHECK_THROWS_AS(beam_decode_awd(t, trace, 0, 4), InvalidArgument);
}

TEST_CASE("beam_decode_awd with one beam is the identity") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<float> u(0, 1);
  AwdTensor t(1, 5, 2, 3, 4);
  for (float& v : t.values()) v = u(rng);
  const auto a = beam_decode_awd(t, BeamTrace(5, std::vector<int>{0}), 0, 5);
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == static_cast<double>(t.values()[i]));
}

TEST_CASE("split_summary_sentences") {
  CHECK(split_summary_sentences(std::vector<int>{7, 7, 3, 7, 3}, 3) == SentenceSpans{{0, 3}, {3, 5}});
  CHECK(split_summary_sentences(std::vector<int>{7, 8, 9}, 3) == SentenceSpans{{0, 3}});
  CHECK(split_summary_sentences(std::vector<int>{}, 3).empty());
  CHECK(split_summary_sentences(std::vector<int>{3, 7}, 3) == SentenceSpans{{0, 1}, {1, 2}});
}

TEST_CASE("mean aggregation") {
  const auto a = aligned_from({{0.2, 0.8}, {0.4, 0.6}});
  const auto s = aggregate_to_sentences(a, {{0, 2}}, Aggregation::mean);
  CHECK(s.at(0, 0, 0, 0) == doctest::Approx(0.3));
  CHECK(s.at(0, 0, 0, 1) == doctest::Approx(0.7));
}

TEST_CASE("median aggregation renormalizes") {
  const auto a = aligned_from({{0.1, 0.9}, {0.5, 0.5}, {0.9, 0.1}});
  const auto s = aggregate_to_sentences(a, {{0, 3}}, Aggregation::median);
  CHECK(s.at(0, 0, 0, 0) == doctest::Approx(0.5));

  // Medians 0.5, 0.2, 0.1 sum to 0.8 before renormalization.
  const auto b = aligned_from({{0.1, 0.2, 0.7}, {0.5, 0.4, 0.1}, {0.9, 0.05, 0.05}});
  const auto m = aggregate_to_sentences(b, {{0, 3}}, Aggregation::median);
  CHECK(m.at(0, 0, 0, 0) == doctest::Approx(0.625));
  CHECK(m.at(0, 0, 0, 1) == doctest::Approx(0.25));
  CHECK(m.at(0, 0, 0, 2) == doctest::Approx(0.125));

  // Even counts take the midpoint.
  const auto c = aligned_from({{0.2, 0.8}, {0.4, 0.6}});
  CHECK(aggregate_to_sentences(c, {{0, 2}}, Aggregation::median).at(0, 0, 0, 0) == doctest::Approx(0.3));
  CHECK(parse_aggregation("median") == Aggregation::median);
  CHECK_THROWS_AS(parse_aggregation("max"), InvalidArgument);
}

TEST_CASE("aggregation rejects spans outside the tensor") {
  const auto a = aligned_from({{0.5, 0.5}});
  CHECK_THROWS_AS(aggregate_to_sentences(a, {{0, 2}}, Aggregation::mean), InvalidArgument);
  CHECK_THROWS_AS(aggregate_to_sentences(a, {{1, 1}}, Aggregation::mean), InvalidArgument);
}

TEST_CASE("property: identity, simplex, uniform, serial agreement, weighted merge") {
  std::mt19937 rng(8);
  std::uniform_int_distribution<int> dim(1, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const int steps = dim(rng) + 1;
    const auto a = random_aligned(rng, steps, dim(rng), dim(rng), dim(rng));

    SentenceSpans singles;
    for (int t = 0; t < steps; ++t) singles.emplace_back(t, t + 1);
    CHECK(aggregate_to_sentences(a, singles, Aggregation::mean).values == a.values);
    CHECK(aggregate_to_sentences(a, singles, Aggregation::median).values == a.values);

    std::uniform_int_distribution<int> cut(1, steps - 1);
    const int k = cut(rng);
    const SentenceSpans two{{0, k}, {k, steps}};
    for (auto method : {Aggregation::mean, Aggregation::median}) {
      const auto par = aggregate_to_sentences(a, two, method);
      CHECK(par.values == aggregate_to_sentences_serial(a, two, method).values);
      for (int s = 0; s < 2; ++s) {
        for (int l = 0; l < a.layers; ++l) {
          for (int h = 0; h < a.heads; ++h) {
            double sum = 0.0;
            for (double v : par.slice(s, l, h)) {
              CHECK(v >= 0.0);
              sum += v;
            }
            CHECK(std::abs(sum - 1.0) < 1e-6);
          }
        }
      }
    }

    const auto whole = aggregate_to_sentences(a, {{0, steps}}, Aggregation::mean);
    const auto parts = aggregate_to_sentences(a, two, Aggregation::mean);
    for (int l = 0; l < a.layers; ++l) {
      for (int h = 0; h < a.heads; ++h) {
        for (int p = 0; p < a.units; ++p) {
          const double merged = (k * parts.at(0, l, h, p) + (steps - k) * parts.at(1, l, h, p)) / steps;
          CHECK(merged == doctest::Approx(whole.at(0, l, h, p)).epsilon(1e-12));
        }
      }
    }

    AlignedAwd uni = a;
    for (double& v : uni.values) v = 1.0 / a.units;
    for (auto method : {Aggregation::mean, Aggregation::median}) {
      for (double v : aggregate_to_sentences(uni, two, method).values) {
        CHECK(v == doctest::Approx(1.0 / a.units).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("AWD1 encoding") {
  AwdTensor t(1, 1, 1, 1, 2);
  t.values()[0] = 1.0f;
  t.values()[1] = -2.5f;
  const auto bytes = encode_awd(t);
  REQUIRE(bytes.size() == 4 + 20 + 8);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "AWD1");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[20] == 2);
  // 1.0f = 0x3f800000, little endian
  CHECK(bytes[24] == 0x00);
  CHECK(bytes[27] == 0x3f);
  CHECK(decode_awd(bytes) == t);

  auto bad = bytes;
  bad[0] = 'X';
  bad[1] = 'X';
  bad[2] = 'X';
  bad[3] = 'X';
  CHECK_THROWS_AS(decode_awd(bad), AwdBadMagic);
  auto shortened = bytes;
  shortened.pop_back();
  CHECK_THROWS_AS(decode_awd(shortened), AwdTruncated);
  auto longer = bytes;
  longer.push_back(0);
  CHECK_THROWS_AS(decode_awd(longer), AwdFormatError);
  auto header_only = std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 10);
  CHECK_THROWS_AS(decode_awd(header_only), AwdTruncated);

  auto huge = bytes;
  for (int i = 4; i < 24; ++i) huge[static_cast<std::size_t>(i)] = 0xff;
  CHECK_THROWS_AS(decode_awd(huge), AwdDimOverflow);
}

TEST_CASE("AWD1 file round trip keeps every bit") {
  std::mt19937 rng(21);
  std::uniform_int_distribution<std::uint32_t> bits;
  AwdTensor t(2, 3, 2, 2, 5);
  for (float& v : t.values()) v = std::bit_cast<float>(bits(rng));
  const auto path = std::filesystem::temp_directory_path() / "attnorigin_test_roundtrip.awd";
  write_awd(t, path);
  const auto back = read_awd(path);
  std::filesystem::remove(path);
  REQUIRE(back.dims() == t.dims());
  for (std::size_t i = 0; i < t.values().size(); ++i) {
    CHECK(std::bit_cast<std::uint32_t>(back.values()[i]) == std::bit_cast<std::uint32_t>(t.values()[i]));
  }
  CHECK_THROWS_AS(read_awd(path), IoError);
}
