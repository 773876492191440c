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

#include "vocab_graft/embedding_bridge.h"

#include <cstring>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "test_util.h"
#include "vocab_graft/errors.h"

namespace vocab_graft {
namespace {

Matrix RandomMatrix(std::mt19937_64& rng, size_t rows, size_t cols) {
  std::normal_distribution<float> dist(0.0f, 1.0f);
  Matrix m(rows, cols);
  for (float& v : m.data()) v = dist(rng);
  return m;
}

// Reference gather written against the flat buffer, not Matrix::row.
std::vector<float> Gather(const Matrix& m, std::span<const int64_t> ids) {
  std::vector<float> out;
  for (const int64_t id : ids) {
    const float* base = m.data().data() + static_cast<size_t>(id) * m.cols();
    out.insert(out.end(), base, base + m.cols());
  }
  return out;
}

bool BitEqual(std::span<const float> a, std::span<const float> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size_bytes()) == 0;
}

TEST(EmbeddingBridgeTest, SplitShapes) {
  std::mt19937_64 rng(1);
  const Matrix m = RandomMatrix(rng, 4, 2);
  const SplitEmbeddings s = Split(m, 3);
  EXPECT_EQ(s.old_table.rows(), 3u);
  EXPECT_EQ(s.new_table.rows(), 1u);
  EXPECT_EQ(s.width(), 2u);
  EXPECT_EQ(Split(m, 4).new_table.rows(), 0u);
  EXPECT_THROW(Split(m, 0), InvalidArgument);
  EXPECT_THROW(Split(m, 5), InvalidArgument);
}

TEST(EmbeddingBridgeTest, LookupAcrossTheBoundary) {
  std::mt19937_64 rng(2);
  const Matrix m = RandomMatrix(rng, 4, 2);
  const SplitEmbeddings s = Split(m, 3);
  const std::vector<int64_t> zero = {0};
  EXPECT_TRUE(BitEqual(Lookup(s, zero).data(), s.old_table.row(0)));
  const std::vector<int64_t> boundary = {3};
  EXPECT_TRUE(BitEqual(Lookup(s, boundary).data(), s.new_table.row(0)));
  const std::vector<int64_t> bad = {4};
  EXPECT_THROW(Lookup(s, bad), InvalidArgument);
  const std::vector<int64_t> negative = {-1};
  EXPECT_THROW(Lookup(s, negative), InvalidArgument);
}

TEST(EmbeddingBridgeTest, LookupEqualsSingleTableGather) {
  std::mt19937_64 rng(3);
  const Matrix m = RandomMatrix(rng, 50, 8);
  const SplitEmbeddings s = Split(m, 17);
  std::uniform_int_distribution<int64_t> id(0, 49);
  std::vector<int64_t> ids(1000);
  for (auto& i : ids) i = id(rng);
  EXPECT_TRUE(BitEqual(Lookup(s, ids).data(), Gather(m, ids)));
}

TEST(EmbeddingBridgeTest, MergeRoundTrips) {
  std::mt19937_64 rng(4);
  const Matrix m = RandomMatrix(rng, 10, 4);
  EXPECT_EQ(Merge(Split(m, 7)), m);
  EXPECT_EQ(Merge(Split(m, 10)), m);
  const Matrix merged = Merge(Split(m, 3));
  const SplitEmbeddings other = Split(merged, 8);
  EXPECT_FALSE(other.old_table == Split(m, 3).old_table);
  EXPECT_EQ(Merge(other), m);
}

TEST(EmbeddingBridgeTest, RoundTripKeepsNanPayloadsAndSignedZeros) {
  Matrix m(3, 2);
  m.data()[0] = -0.0f;
  m.data()[1] = std::numeric_limits<float>::quiet_NaN();
  m.data()[5] = std::numeric_limits<float>::denorm_min();
  EXPECT_EQ(Merge(Split(m, 1)), m);
  testing::TempDir dir;
  WriteMatrix(m, dir / "m.bin");
  EXPECT_EQ(ReadMatrix(dir / "m.bin"), m);
}

TEST(EmbeddingBridgeTest, InitZeroAndDeterminism) {
  std::mt19937_64 rng(5);
  const SplitEmbeddings s = Split(RandomMatrix(rng, 20, 3), 15);
  const Matrix old_before = s.old_table;
  const SplitEmbeddings zero = InitNewRows(s, 1, InitScheme::kZero);
  for (const float v : zero.new_table.data()) EXPECT_EQ(v, 0.0f);
  const SplitEmbeddings a = InitNewRows(s, 42, InitScheme::kNormalFromOldStats);
  const SplitEmbeddings b = InitNewRows(s, 42, InitScheme::kNormalFromOldStats);
  const SplitEmbeddings c = InitNewRows(s, 43, InitScheme::kNormalFromOldStats);
  EXPECT_EQ(a.new_table, b.new_table);
  EXPECT_FALSE(a.new_table == c.new_table);
  EXPECT_EQ(a.old_table, old_before);
  EXPECT_EQ(s.old_table, old_before);
}

TEST(EmbeddingBridgeTest, InitFromConstantTableIsConstant) {
  Matrix m(6, 3);
  for (float& v : m.data()) v = 5.0f;
  const SplitEmbeddings init = InitNewRows(Split(m, 4), 9, InitScheme::kNormalFromOldStats);
  for (const float v : init.new_table.data()) EXPECT_NEAR(v, 5.0f, 1e-6f);
}

TEST(EmbeddingBridgeTest, InitMatchesOldMoments) {
  std::mt19937_64 rng(6);
  Matrix m(4000, 2);
  std::normal_distribution<float> col0(3.0f, 0.5f), col1(-1.0f, 2.0f);
  for (size_t r = 0; r < m.rows(); ++r) {
    m.row(r)[0] = col0(rng);
    m.row(r)[1] = col1(rng);
  }
  const SplitEmbeddings init = InitNewRows(Split(m, 2000), 7, InitScheme::kNormalFromOldStats);
  double sum0 = 0, sum1 = 0;
  for (size_t r = 0; r < init.new_table.rows(); ++r) {
    sum0 += init.new_table.row(r)[0];
    sum1 += init.new_table.row(r)[1];
  }
  EXPECT_NEAR(sum0 / 2000, 3.0, 0.1);
  EXPECT_NEAR(sum1 / 2000, -1.0, 0.3);
}

TEST(EmbeddingBridgeTest, MatrixFileErrors) {
  testing::TempDir dir;
  testing::WriteText(dir / "bad.bin", "NOTEMBED");
  EXPECT_THROW(ReadMatrix(dir / "bad.bin"), FormatError);
  Matrix m(2, 2);
  WriteMatrix(m, dir / "ok.bin");
  std::string bytes = testing::ReadText(dir / "ok.bin");
  testing::WriteText(dir / "short.bin", bytes.substr(0, bytes.size() - 1));
  EXPECT_THROW(ReadMatrix(dir / "short.bin"), FormatError);
  EXPECT_THROW(ReadMatrix(dir / "absent.bin"), IoError);
}

}  // namespace
}  // namespace vocab_graft
