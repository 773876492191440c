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

#ifndef VOCAB_GRAFT_CORPUS_READER_H_
#define VOCAB_GRAFT_CORPUS_READER_H_

#include <algorithm>
#include <cstddef>
#include <istream>
#include <string>
#include <thread>
#include <vector>

namespace vocab_graft {

// Reads corpus records: one per line, or JSON lines carrying a "text" field.
// The format is chosen from the first byte of the stream ('{' means JSON
// lines). A trailing CR is stripped from every line.
class RecordReader {
 public:
  explicit RecordReader(std::istream& in);

  // Returns false at end of input. Throws IoError or FormatError naming the
  // failing record index.
  bool Next(std::string* record);

  // Reads up to `max_records` records into `batch` (cleared first).
  size_t NextBatch(std::vector<std::string>* batch, size_t max_records);

  size_t records_read() const { return records_read_; }
  bool is_json_lines() const { return json_lines_; }

 private:
  std::istream& in_;
  bool json_lines_ = false;
  size_t records_read_ = 0;
  size_t line_no_ = 0;
};

// Runs fn(i) for i in [0, n) on up to `threads` workers with a static
// partition. Results must be written to per-index slots for determinism.
template <typename Fn>
void ParallelFor(size_t n, int threads, Fn&& fn) {
  const size_t workers = std::min<size_t>(n, static_cast<size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace vocab_graft

#endif  // VOCAB_GRAFT_CORPUS_READER_H_
