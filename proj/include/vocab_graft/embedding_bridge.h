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

// Two-table embedding lookup: rows below the boundary id live in the
// existing-vocabulary table, the rest in the added-vocabulary table. A
// lookup through the pair is bit-identical to a gather from the single
// concatenated matrix.

#ifndef VOCAB_GRAFT_EMBEDDING_BRIDGE_H_
#define VOCAB_GRAFT_EMBEDDING_BRIDGE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace vocab_graft {

// Dense row-major float matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0f) {}
  Matrix(size_t rows, size_t cols, std::vector<float> data);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  std::span<float> row(size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const float> row(size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

  // Bitwise comparison: NaN payloads and signed zeros must match.
  bool operator==(const Matrix& other) const;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<float> data_;
};

struct SplitEmbeddings {
  Matrix old_table;  // [boundary_id x d]
  Matrix new_table;  // [(V - boundary_id) x d]

  size_t boundary_id() const { return old_table.rows(); }
  size_t width() const { return old_table.cols(); }
  size_t vocab_size() const { return old_table.rows() + new_table.rows(); }
};

// Throws InvalidArgument unless 1 <= boundary_id <= single.rows().
SplitEmbeddings Split(const Matrix& single, size_t boundary_id);

// Row i of the result is the embedding of ids[i]. Throws InvalidArgument on
// an out-of-range id.
Matrix Lookup(const SplitEmbeddings& split, std::span<const int64_t> ids);

Matrix Merge(const SplitEmbeddings& split);

enum class InitScheme {
  // Per-column mean and population standard deviation of the old table.
  kNormalFromOldStats,
  kZero,
};

// Returns a copy whose new table is redrawn deterministically from `seed`;
// the old table is copied untouched.
SplitEmbeddings InitNewRows(const SplitEmbeddings& split, uint64_t seed, InitScheme scheme);

// File layout: "VGEMBED\0", u32 version, u64 rows, u64 cols, then rows*cols
// IEEE-754 binary32 values, all little-endian.
void WriteMatrix(const Matrix& matrix, const std::filesystem::path& path);
Matrix ReadMatrix(const std::filesystem::path& path);

}  // namespace vocab_graft

#endif  // VOCAB_GRAFT_EMBEDDING_BRIDGE_H_
