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

#include <bit>
#include <cmath>
#include <cstring>
#include <random>
#include <string>

#include "vocab_graft/errors.h"
#include "vocab_graft/model_store.h"

namespace vocab_graft {
namespace {

constexpr char kMagic[8] = {'V', 'G', 'E', 'M', 'B', 'E', 'D', '\0'};
constexpr uint32_t kVersion = 1;

void PutLe(std::string* out, uint64_t value, int bytes) {
  for (int i = 0; i < bytes; ++i) out->push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

uint64_t GetLe(std::string_view in, size_t pos, int bytes) {
  uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) {
    v = (v << 8) | static_cast<unsigned char>(in[pos + static_cast<size_t>(i)]);
  }
  return v;
}

}  // namespace

Matrix::Matrix(size_t rows, size_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw InvalidArgument("matrix data has " + std::to_string(data_.size()) +
                          " values, expected " + std::to_string(rows_ * cols_));
  }
}

bool Matrix::operator==(const Matrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ &&
         (data_.empty() ||
          std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(float)) == 0);
}

SplitEmbeddings Split(const Matrix& single, size_t boundary_id) {
  if (boundary_id < 1 || boundary_id > single.rows()) {
    throw InvalidArgument("boundary id " + std::to_string(boundary_id) +
                          " outside [1, " + std::to_string(single.rows()) + "]");
  }
  const auto all = single.data();
  const size_t cut = boundary_id * single.cols();
  return {Matrix(boundary_id, single.cols(), {all.begin(), all.begin() + static_cast<ptrdiff_t>(cut)}),
          Matrix(single.rows() - boundary_id, single.cols(),
                 {all.begin() + static_cast<ptrdiff_t>(cut), all.end()})};
}

Matrix Lookup(const SplitEmbeddings& split, std::span<const int64_t> ids) {
  const size_t boundary = split.boundary_id();
  const size_t vocab = split.vocab_size();
  Matrix out(ids.size(), split.width());
  for (size_t i = 0; i < ids.size(); ++i) {
    const int64_t id = ids[i];
    if (id < 0 || static_cast<uint64_t>(id) >= vocab) {
      throw InvalidArgument("token id " + std::to_string(id) + " outside [0, " +
                            std::to_string(vocab) + ")");
    }
    const auto u = static_cast<size_t>(id);
    const auto src = u < boundary ? split.old_table.row(u) : split.new_table.row(u - boundary);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Merge(const SplitEmbeddings& split) {
  if (split.new_table.rows() > 0 && split.new_table.cols() != split.old_table.cols()) {
    throw InvalidArgument("embedding tables differ in width");
  }
  std::vector<float> data(split.old_table.data().begin(), split.old_table.data().end());
  data.insert(data.end(), split.new_table.data().begin(), split.new_table.data().end());
  return Matrix(split.vocab_size(), split.width(), std::move(data));
}

SplitEmbeddings InitNewRows(const SplitEmbeddings& split, uint64_t seed, InitScheme scheme) {
  SplitEmbeddings out{split.old_table, Matrix(split.new_table.rows(), split.width())};
  if (scheme == InitScheme::kZero) return out;

  const size_t d = split.width();
  const size_t n = split.old_table.rows();
  std::vector<double> mean(d, 0.0);
  std::vector<double> stddev(d, 0.0);
  for (size_t r = 0; r < n; ++r) {
    const auto row = split.old_table.row(r);
    for (size_t c = 0; c < d; ++c) mean[c] += row[c];
  }
  for (double& m : mean) m /= static_cast<double>(n);
  for (size_t r = 0; r < n; ++r) {
    const auto row = split.old_table.row(r);
    for (size_t c = 0; c < d; ++c) {
      const double delta = row[c] - mean[c];
      stddev[c] += delta * delta;
    }
  }
  for (double& s : stddev) s = std::sqrt(s / static_cast<double>(n));

  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (size_t r = 0; r < out.new_table.rows(); ++r) {
    auto row = out.new_table.row(r);
    for (size_t c = 0; c < d; ++c) {
      row[c] = static_cast<float>(mean[c] + stddev[c] * normal(engine));
    }
  }
  return out;
}

void WriteMatrix(const Matrix& matrix, const std::filesystem::path& path) {
  std::string bytes(kMagic, sizeof(kMagic));
  PutLe(&bytes, kVersion, 4);
  PutLe(&bytes, matrix.rows(), 8);
  PutLe(&bytes, matrix.cols(), 8);
  bytes.reserve(bytes.size() + matrix.data().size() * 4);
  for (const float v : matrix.data()) PutLe(&bytes, std::bit_cast<uint32_t>(v), 4);
  WriteFileBytes(path, bytes);
}

Matrix ReadMatrix(const std::filesystem::path& path) {
  const std::string bytes = ReadFileBytes(path);
  const std::string where = path.string() + ": ";
  constexpr size_t kHeader = sizeof(kMagic) + 4 + 8 + 8;
  if (bytes.size() < kHeader || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError(where + "not an embedding matrix file");
  }
  const uint64_t version = GetLe(bytes, 8, 4);
  if (version != kVersion) {
    throw FormatError(where + "unsupported version " + std::to_string(version));
  }
  const uint64_t rows = GetLe(bytes, 12, 8);
  const uint64_t cols = GetLe(bytes, 20, 8);
  const uint64_t payload = bytes.size() - kHeader;
  if (cols != 0 && rows > payload / 4 / cols) {
    throw FormatError(where + "truncated payload");
  }
  if (payload != rows * cols * 4) {
    throw FormatError(where + "payload is " + std::to_string(payload) + " bytes, expected " +
                      std::to_string(rows * cols * 4));
  }
  std::vector<float> data(rows * cols);
  for (size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<float>(static_cast<uint32_t>(GetLe(bytes, kHeader + 4 * i, 4)));
  }
  return Matrix(rows, cols, std::move(data));
}

}  // namespace vocab_graft
