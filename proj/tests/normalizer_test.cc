// Copyright 2026 The vocab-graft Authors
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

#include "vocab_graft/normalizer.h"

#include <random>

#include <gtest/gtest.h>

#include "test_util.h"
#include "vocab_graft/unicode.h"

namespace vocab_graft {
namespace {

const NormalizerConfig kDefault{};
const std::string kMarker = EncodeUtf8(std::u32string(1, kSpaceMarker));

TEST(NormalizerTest, RunOfExactlyLimitIsUntouched) {
  EXPECT_EQ(Normalize("aaa", kDefault).text, "aaa");
}

TEST(NormalizerTest, RunLongerThanLimitBecomesOneCharacter) {
  EXPECT_EQ(Normalize("aaaa", kDefault).text, "a");
  EXPECT_EQ(Normalize("xaaaaaaay", kDefault).text, "xay");
  // Thai scalar runs are squashed on scalars, not bytes.
  EXPECT_EQ(Normalize("\xE0\xB9\x86\xE0\xB9\x86\xE0\xB9\x86\xE0\xB9\x86", kDefault).text,
            "\xE0\xB9\x86");
}

TEST(NormalizerTest, EmptyInput) {
  const NormalizedText out = Normalize("", kDefault);
  EXPECT_EQ(out.text, "");
  EXPECT_TRUE(out.space_positions.empty());
}

TEST(NormalizerTest, LowercasesBeforeSquashing) {
  EXPECT_EQ(Normalize("AAaa", kDefault).text, "a");
  NormalizerConfig keep_case = kDefault;
  keep_case.lowercase = false;
  EXPECT_EQ(Normalize("AAaa", keep_case).text, "AAaa");
}

TEST(NormalizerTest, SpacesBecomeMarkersAndAreRecorded) {
  const NormalizedText out = Normalize("a b\tc\nd", kDefault);
  EXPECT_EQ(out.text, "a" + kMarker + "b" + kMarker + "c" + kMarker + "d");
  EXPECT_EQ(out.space_positions, (std::vector<size_t>{1, 5, 9}));
  EXPECT_EQ(out.text.find(' '), std::string::npos);
}

TEST(NormalizerTest, OtherWhitespacePassesThrough) {
  const std::string nbsp = "\xC2\xA0";
  EXPECT_EQ(Normalize("a" + nbsp + "b", kDefault).text, "a" + nbsp + "b");
}

TEST(NormalizerTest, SpaceRunsAreSquashedLikeOtherRuns) {
  const NormalizedText out = Normalize("a    b", kDefault);
  EXPECT_EQ(out.text, "a" + kMarker + "b");
  EXPECT_EQ(Normalize("a   b", kDefault).space_positions.size(), 3u);
}

TEST(NormalizerTest, PreserveSpaceOffKeepsLiteralSpaces) {
  NormalizerConfig cfg = kDefault;
  cfg.preserve_space = false;
  const NormalizedText out = Normalize("a b", cfg);
  EXPECT_EQ(out.text, "a b");
  EXPECT_TRUE(out.space_positions.empty());
}

TEST(NormalizerTest, RandomInputsSatisfyProperties) {
  std::mt19937_64 rng(3);
  const std::u32string alphabet = U"aAb ก่\U0001F600";
  for (int trial = 0; trial < 2000; ++trial) {
    NormalizerConfig cfg;
    cfg.max_char_repeat = 1 + static_cast<int>(rng() % 4);
    cfg.lowercase = rng() % 2;
    const std::string raw = EncodeUtf8(testing::RandomString(rng, alphabet, 24));
    const NormalizedText once = Normalize(raw, cfg);
    ASSERT_EQ(Normalize(once.text, cfg), once) << raw;  // idempotent
    const std::u32string scalars = DecodeUtf8(once.text);
    size_t run = 0;
    for (size_t i = 0; i < scalars.size(); ++i) {
      run = (i > 0 && scalars[i] == scalars[i - 1]) ? run + 1 : 1;
      ASSERT_LE(run, static_cast<size_t>(cfg.max_char_repeat)) << raw;
      ASSERT_NE(scalars[i], U' ');
    }
    for (size_t pos : once.space_positions) {
      ASSERT_EQ(once.text.compare(pos, kMarker.size(), kMarker), 0);
    }
  }
}

}  // namespace
}  // namespace vocab_graft
