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

#ifndef VOCAB_GRAFT_CORPUS_PIPELINE_H_
#define VOCAB_GRAFT_CORPUS_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vocab_graft/corpus_reader.h"
#include "vocab_graft/unigram_tokenizer.h"

namespace vocab_graft {

inline constexpr size_t kDefaultChunkLimit = 416;

struct ChunkedDataset {
  std::vector<std::vector<TokenId>> chunks;
  // Record indices packed into each chunk.
  std::vector<std::vector<size_t>> source_spans;
  size_t chunk_limit = kDefaultChunkLimit;
  size_t record_count = 0;
  // Records longer than chunk_limit, dropped whole.
  size_t discarded_count = 0;
  size_t discarded_tokens = 0;
  // Records that encode to zero tokens; they belong to no chunk.
  size_t empty_count = 0;

  size_t packed_tokens() const;
};

// Sequential greedy packer. A record joins the open chunk when the combined
// length fits, otherwise it opens a new chunk; records are never split.
class ChunkPacker {
 public:
  // Throws InvalidArgument if limit == 0.
  ChunkPacker(size_t limit, bool pack);

  void Add(size_t record_index, std::vector<TokenId> ids);
  ChunkedDataset Finish();

 private:
  ChunkedDataset dataset_;
  bool pack_;
  bool open_ = false;
};

struct ChunkOptions {
  size_t limit = kDefaultChunkLimit;
  // false keeps one record per chunk.
  bool pack = true;
  int threads = 1;
};

// Normalizes, encodes and packs every record of `reader`.
ChunkedDataset Chunk(RecordReader& reader, const UnigramTokenizer& tokenizer,
                     const NormalizerConfig& config, const ChunkOptions& options);

// "VGCHUNKS", u32 version, u32 chunk count, then per chunk u32 length and
// u32 ids, all little-endian.
std::string SerializeChunks(const std::vector<std::vector<TokenId>>& chunks);
std::vector<std::vector<TokenId>> ParseChunks(std::string_view bytes);
void WriteChunks(const std::vector<std::vector<TokenId>>& chunks,
                 const std::filesystem::path& path);
std::vector<std::vector<TokenId>> ReadChunks(const std::filesystem::path& path);

nlohmann::ordered_json ChunkManifest(const ChunkedDataset& dataset,
                                     const std::string& model_checksum, bool packed);

// Splits chunk indices into consecutive groups whose sizes follow
// `fractions` after a seeded shuffle. Fractions must be non-negative and
// sum to 1; the last group takes the rounding remainder.
std::vector<std::vector<size_t>> SplitIndices(size_t count, const std::vector<double>& fractions,
                                              uint64_t seed);

struct OovEntry {
  size_t unk_count = 0;
  size_t total_tokens = 0;

  double fraction() const {
    return total_tokens == 0 ? 0.0
                             : static_cast<double>(unk_count) /
                                   static_cast<double>(total_tokens);
  }
  bool operator==(const OovEntry&) const = default;
};

struct OovReport {
  std::map<std::string, OovEntry> per_dataset;
  // Datasets whose stream failed, with the error message.
  std::map<std::string, std::string> errors;

  nlohmann::ordered_json ToJson() const;
};

// Human-readable percentage: "0%" for none, "~0%" below 0.005%, else two
// decimals.
std::string FormatOovPercentage(const OovEntry& entry);

// Opens a corpus for one dataset. Called once per dataset.
using CorpusOpener = std::function<std::unique_ptr<std::istream>()>;

// Counts <unk> for both tokenizers over identical normalized records. A
// failing dataset is recorded in `errors` of both reports; the others are
// still counted.
std::pair<OovReport, OovReport> OovReports(
    const std::vector<std::pair<std::string, CorpusOpener>>& corpora,
    const UnigramTokenizer& model_a, const UnigramTokenizer& model_b,
    const NormalizerConfig& config, int threads = 1);

struct SegmentationDifference {
  size_t record_index = 0;
  std::vector<std::string> tokens_a;
  std::vector<std::string> tokens_b;
};

// Calls `sink` for every record whose two encodings differ (by surface
// sequence). Returns the number of records read.
size_t SegmentationDiff(RecordReader& reader, const UnigramTokenizer& model_a,
                        const UnigramTokenizer& model_b, const NormalizerConfig& config,
                        const std::function<void(const SegmentationDifference&)>& sink,
                        int threads = 1);

}  // namespace vocab_graft

#endif  // VOCAB_GRAFT_CORPUS_PIPELINE_H_
