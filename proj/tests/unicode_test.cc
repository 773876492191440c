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

#include "vocab_graft/unicode.h"

#include <random>

#include <gtest/gtest.h>

#include "vocab_graft/errors.h"

namespace vocab_graft {
namespace {

TEST(UnicodeTest, RoundTripsScalarsOfEveryWidth) {
  const std::u32string scalars = U"aéก\U0001F600";
  const std::string utf8 = EncodeUtf8(scalars);
  EXPECT_EQ(utf8, "a\xC3\xA9\xE0\xB8\x81\xF0\x9F\x98\x80");
  EXPECT_EQ(DecodeUtf8(utf8), scalars);
}

TEST(UnicodeTest, RejectsMalformedSequences) {
  EXPECT_FALSE(IsValidUtf8("\xC0\xAF"));          // overlong
  EXPECT_FALSE(IsValidUtf8("\xE0\x80\xAF"));      // overlong 3-byte
  EXPECT_FALSE(IsValidUtf8("\xED\xA0\x80"));      // surrogate
  EXPECT_FALSE(IsValidUtf8("\xF4\x90\x80\x80"));  // above U+10FFFF
  EXPECT_FALSE(IsValidUtf8("\xE0\xB8"));          // truncated
  EXPECT_TRUE(IsValidUtf8(""));
  EXPECT_THROW(DecodeUtf8("\xFF"), FormatError);
}

TEST(UnicodeTest, RandomScalarsRoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<uint32_t> dist(1, 0x10FFFF);
  for (int trial = 0; trial < 200; ++trial) {
    std::u32string s;
    while (s.size() < 20) {
      const char32_t c = dist(rng);
      if (c >= 0xD800 && c <= 0xDFFF) continue;
      s.push_back(c);
    }
    const std::string utf8 = EncodeUtf8(s);
    ASSERT_TRUE(IsValidUtf8(utf8));
    ASSERT_EQ(DecodeUtf8(utf8), s);
  }
}

TEST(UnicodeTest, ParsesRanges) {
  EXPECT_EQ(ParseScalarRange("0E00..0E7F"), (ScalarRange{0x0E00, 0x0E7F}));
  EXPECT_EQ(ParseScalarRange("1F600"), (ScalarRange{0x1F600, 0x1F600}));
  EXPECT_EQ(FormatScalarRange({0x0E00, 0x0E7F}), "0E00..0E7F");
  EXPECT_THROW(ParseScalarRange("0E7F..0E00"), InvalidArgument);
  EXPECT_THROW(ParseScalarRange("zz"), InvalidArgument);
  EXPECT_THROW(ParseScalarRange("D800"), InvalidArgument);
}

TEST(UnicodeTest, SimpleLowercase) {
  EXPECT_EQ(SimpleLowercase(U'A'), U'a');
  EXPECT_EQ(SimpleLowercase(U'É'), U'é');
  EXPECT_EQ(SimpleLowercase(U'Α'), U'α');  // Greek alpha
  EXPECT_EQ(SimpleLowercase(U'ก'), U'ก');  // Thai has no case
  EXPECT_EQ(SimpleLowercase(U'İ'), U'i');       // simple mapping, 1:1
}

}  // namespace
}  // namespace vocab_graft
