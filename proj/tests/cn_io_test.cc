// Copyright 2026 The c2v Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "c2v/cn_io.h"

#include <gtest/gtest.h>

#include <sstream>

#include "c2v/error.h"
#include "c2v/random.h"

namespace c2v {
namespace {

constexpr const char* kFigureLine =
    "u1 i:0.7 eye:0.3 | want:0.4 wand:0.3 won't:0.2 what:0.1 | to:0.5 two:0.3 tees:0.2 | "
    "sit:0.5 seat:0.3 seed:0.1 eat:0.1";

TEST(CnParse, FigureNetworkTopology) {
  auto cn = parse_cn_line(kFigureLine);
  EXPECT_EQ(cn.utterance_id, "u1");
  ASSERT_EQ(cn.slots.size(), 4u);
  std::vector<std::size_t> sizes;
  for (const auto& s : cn.slots) sizes.push_back(s.alternatives.size());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{2, 4, 3, 4}));
  EXPECT_EQ(cn.slots[1].alternatives[2].word, "won't");
  EXPECT_DOUBLE_EQ(cn.slots[1].alternatives[2].posterior, 0.2);
}

TEST(CnParse, SingleArc) {
  auto cn = parse_cn_line("u2 hello:1.0");
  ASSERT_EQ(cn.slots.size(), 1u);
  ASSERT_EQ(cn.slots[0].alternatives.size(), 1u);
  EXPECT_EQ(cn.slots[0].alternatives[0].posterior, 1.0);
}

TEST(CnParse, Rejects) {
  EXPECT_THROW(parse_cn_line("u a:0.5 a:0.5"), FormatError);
  EXPECT_THROW(parse_cn_line("u a:1.5"), FormatError);
  EXPECT_THROW(parse_cn_line("u a:-0.1 b:1.1"), FormatError);
  EXPECT_THROW(parse_cn_line("u a:0.5 b:0.4"), FormatError);  // sums to 0.9
  EXPECT_THROW(parse_cn_line("u a0.5"), FormatError);
  EXPECT_THROW(parse_cn_line("u a:1.0 |"), FormatError);
  EXPECT_THROW(parse_cn_line("u"), FormatError);
  EXPECT_NO_THROW(parse_cn_line("u a:0.5 b:0.5005"));  // within 1e-3
}

TEST(CnParse, ErrorCarriesLineNumber) {
  std::istringstream in("# header\nu1 a:1.0\nu2 a:0.2\n");
  CnReader reader(in);
  ASSERT_TRUE(reader.next());
  try {
    reader.next();
    FAIL() << "expected a format error";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(CnParse, CaseFoldsAndKeepsEpsilon) {
  auto cn = parse_cn_line("u Hello:0.6 <eps>:0.4");
  EXPECT_EQ(cn.slots[0].alternatives[0].word, "hello");
  EXPECT_TRUE(cn.slots[0].alternatives[1].is_epsilon());
}

TEST(PlainCorpus, Examples) {
  auto one = parse_plain_text("i want to sit\n");
  ASSERT_EQ(one.size(), 1u);
  ASSERT_EQ(one[0].slots.size(), 4u);
  for (const auto& s : one[0].slots) {
    ASSERT_EQ(s.alternatives.size(), 1u);
    EXPECT_EQ(s.alternatives[0].posterior, 1.0);
  }
  EXPECT_TRUE(parse_plain_text("").empty());
  auto two = parse_plain_text("a b\n\n   \nc\n");
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].slots.size(), 2u);
  EXPECT_EQ(two[1].slots.size(), 1u);
}

TEST(Top1Path, Examples) {
  EXPECT_EQ(top1_path(parse_cn_line(kFigureLine)),
            (std::vector<std::string>{"i", "want", "to", "sit"}));
  EXPECT_EQ(top1_path(parse_cn_line("u <eps>:0.9 a:0.1 | b:1.0")), (std::vector<std::string>{"b"}));
  // Ties go to the earlier alternative.
  EXPECT_EQ(top1_path(parse_cn_line("u x:0.5 y:0.5")), (std::vector<std::string>{"x"}));
}

TEST(Top1Path, RecoversPlainTokens) {
  const std::string text = "the cat sat\non the mat today\nx\n";
  auto nets = parse_plain_text(text);
  std::vector<std::vector<std::string>> expect = {
      {"the", "cat", "sat"}, {"on", "the", "mat", "today"}, {"x"}};
  ASSERT_EQ(nets.size(), expect.size());
  for (std::size_t i = 0; i < nets.size(); ++i) EXPECT_EQ(top1_path(nets[i]), expect[i]);
}

TEST(CnWrite, RoundTripsFigureLine) {
  auto cn = parse_cn_line(kFigureLine);
  EXPECT_EQ(format_cn_line(cn), kFigureLine);
  EXPECT_EQ(parse_cn_line(format_cn_line(cn)), cn);
}

TEST(CnWrite, EmptyAndPrecision) {
  EXPECT_EQ(write_cn_text({}), "");
  EXPECT_EQ(format_posterior(0.333333), "0.333333");
  EXPECT_EQ(format_posterior(0.1234564), "0.123456");
  EXPECT_EQ(format_posterior(1.0), "1.0");
  EXPECT_EQ(format_posterior(0.5), "0.5");
  auto cn = parse_cn_line("u a:0.333333 b:0.333333 c:0.333334");
  EXPECT_EQ(format_cn_line(cn), "u a:0.333333 b:0.333333 c:0.333334");
}

// Random well-formed networks: posteriors are multiples of 1e-6 summing to 1.
std::vector<ConfusionNetwork> random_networks(std::uint64_t seed, std::size_t count) {
  Rng rng(seed);
  std::vector<ConfusionNetwork> nets;
  for (std::size_t n = 0; n < count; ++n) {
    ConfusionNetwork cn;
    cn.utterance_id = "utt" + std::to_string(n);
    auto slots = 1 + uniform_below(rng, 8);
    for (std::size_t t = 0; t < slots; ++t) {
      Slot s;
      auto k = 1 + uniform_below(rng, 5);
      std::uint64_t left = 1'000'000;
      for (std::size_t a = 0; a < k; ++a) {
        std::uint64_t mass = a + 1 == k ? left : uniform_below(rng, left + 1);
        left -= mass;
        std::string w = a == 0 && uniform_below(rng, 10) == 0
                            ? std::string(kEpsilon)
                            : "w" + std::to_string(t) + "_" + std::to_string(a) + "'x";
        s.alternatives.push_back({w, double(mass) / 1e6});
      }
      cn.slots.push_back(std::move(s));
    }
    nets.push_back(std::move(cn));
  }
  return nets;
}

TEST(CnWrite, PropertyRoundTrip) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto nets = random_networks(seed, 30);
    std::string text = write_cn_text(nets);
    auto back = parse_cn_text(text);
    ASSERT_EQ(back, nets) << "seed " << seed;
    EXPECT_EQ(write_cn_text(back), text);
  }
}

TEST(CnIo, MeanAlternatives) {
  auto nets = parse_cn_text(std::string(kFigureLine) + "\nu2 hello:1.0\n");
  EXPECT_DOUBLE_EQ(mean_alternatives(nets), (2.0 + 4 + 3 + 4 + 1) / 5.0);
}

}  // namespace
}  // namespace c2v
