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

#include "vocab_graft/corpus_pipeline.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <random>

#include "vocab_graft/errors.h"
#include "vocab_graft/model_store.h"

namespace vocab_graft {
namespace {

constexpr char kChunkMagic[8] = {'V', 'G', 'C', 'H', 'U', 'N', 'K', 'S'};
constexpr uint32_t kChunkVersion = 1;
constexpr size_t kBatch = 4096;

void PutU32(std::string* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

uint32_t GetU32(std::string_view in, size_t pos) {
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) {
    v = (v << 8) | static_cast<unsigned char>(in[pos + static_cast<size_t>(i)]);
  }
  return v;
}

// Normalizes and encodes a batch in parallel; errors are rethrown in record
// order so the reported index is deterministic.
template <typename Fn>
void ForEachEncoded(const std::vector<std::string>& batch, size_t first_record, int threads,
                    Fn&& per_record) {
  std::vector<std::string> errors(batch.size());
  ParallelFor(batch.size(), threads, [&](size_t i) {
    try {
      per_record(i);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  for (size_t i = 0; i < batch.size(); ++i) {
    if (!errors[i].empty()) {
      throw FormatError("record " + std::to_string(first_record + i) + ": " + errors[i]);
    }
  }
}

}  // namespace

size_t ChunkedDataset::packed_tokens() const {
  size_t total = 0;
  for (const auto& c : chunks) total += c.size();
  return total;
}

ChunkPacker::ChunkPacker(size_t limit, bool pack) : pack_(pack) {
  if (limit == 0) throw InvalidArgument("chunk limit must be >= 1");
  dataset_.chunk_limit = limit;
}

void ChunkPacker::Add(size_t record_index, std::vector<TokenId> ids) {
  ++dataset_.record_count;
  if (ids.empty()) {
    ++dataset_.empty_count;
    return;
  }
  if (ids.size() > dataset_.chunk_limit) {
    ++dataset_.discarded_count;
    dataset_.discarded_tokens += ids.size();
    return;
  }
  if (!open_ || !pack_ || dataset_.chunks.back().size() + ids.size() > dataset_.chunk_limit) {
    dataset_.chunks.emplace_back();
    dataset_.source_spans.emplace_back();
    open_ = true;
  }
  auto& chunk = dataset_.chunks.back();
  chunk.insert(chunk.end(), ids.begin(), ids.end());
  dataset_.source_spans.back().push_back(record_index);
}

ChunkedDataset ChunkPacker::Finish() {
  open_ = false;
  return std::move(dataset_);
}

ChunkedDataset Chunk(RecordReader& reader, const UnigramTokenizer& tokenizer,
                     const NormalizerConfig& config, const ChunkOptions& options) {
  ChunkPacker packer(options.limit, options.pack);
  std::vector<std::string> batch;
  std::vector<std::vector<TokenId>> encoded;
  size_t next_record = 0;
  while (reader.NextBatch(&batch, kBatch) > 0) {
    encoded.assign(batch.size(), {});
    ForEachEncoded(batch, next_record, options.threads, [&](size_t i) {
      encoded[i] = tokenizer.Encode(Normalize(batch[i], config)).ids;
    });
    for (size_t i = 0; i < batch.size(); ++i) packer.Add(next_record + i, std::move(encoded[i]));
    next_record += batch.size();
  }
  return packer.Finish();
}

std::string SerializeChunks(const std::vector<std::vector<TokenId>>& chunks) {
  std::string out(kChunkMagic, sizeof(kChunkMagic));
  PutU32(&out, kChunkVersion);
  PutU32(&out, static_cast<uint32_t>(chunks.size()));
  for (const auto& chunk : chunks) {
    PutU32(&out, static_cast<uint32_t>(chunk.size()));
    for (const TokenId id : chunk) PutU32(&out, static_cast<uint32_t>(id));
  }
  return out;
}

std::vector<std::vector<TokenId>> ParseChunks(std::string_view bytes) {
  constexpr size_t kHeader = sizeof(kChunkMagic) + 8;
  if (bytes.size() < kHeader || std::memcmp(bytes.data(), kChunkMagic, sizeof(kChunkMagic)) != 0) {
    throw FormatError("not a chunk file");
  }
  if (GetU32(bytes, 8) != kChunkVersion) throw FormatError("unsupported chunk file version");
  const uint32_t count = GetU32(bytes, 12);
  std::vector<std::vector<TokenId>> chunks;
  size_t pos = kHeader;
  for (uint32_t c = 0; c < count; ++c) {
    if (pos + 4 > bytes.size()) {
      throw FormatError("truncated chunk file at chunk " + std::to_string(c));
    }
    const uint32_t len = GetU32(bytes, pos);
    pos += 4;
    if (len > (bytes.size() - pos) / 4) {
      throw FormatError("truncated chunk file at chunk " + std::to_string(c));
    }
    std::vector<TokenId> chunk(len);
    for (uint32_t i = 0; i < len; ++i, pos += 4) {
      chunk[i] = static_cast<TokenId>(GetU32(bytes, pos));
    }
    chunks.push_back(std::move(chunk));
  }
  if (pos != bytes.size()) throw FormatError("trailing bytes after last chunk");
  return chunks;
}

void WriteChunks(const std::vector<std::vector<TokenId>>& chunks,
                 const std::filesystem::path& path) {
  WriteFileBytes(path, SerializeChunks(chunks));
}

std::vector<std::vector<TokenId>> ReadChunks(const std::filesystem::path& path) {
  try {
    return ParseChunks(ReadFileBytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

nlohmann::ordered_json ChunkManifest(const ChunkedDataset& dataset,
                                     const std::string& model_checksum, bool packed) {
  nlohmann::ordered_json j;
  j["format"] = "vocab-graft-chunks";
  j["version"] = kChunkVersion;
  j["chunk_limit"] = dataset.chunk_limit;
  j["packed"] = packed;
  j["chunk_count"] = dataset.chunks.size();
  j["record_count"] = dataset.record_count;
  j["discarded_count"] = dataset.discarded_count;
  j["discarded_tokens"] = dataset.discarded_tokens;
  j["empty_count"] = dataset.empty_count;
  j["packed_tokens"] = dataset.packed_tokens();
  j["model_checksum"] = model_checksum;
  return j;
}

std::vector<std::vector<size_t>> SplitIndices(size_t count, const std::vector<double>& fractions,
                                              uint64_t seed) {
  if (fractions.empty()) throw InvalidArgument("split needs at least one fraction");
  double sum = 0.0;
  for (const double f : fractions) {
    if (!(f >= 0.0)) throw InvalidArgument("split fractions must be non-negative");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("split fractions must sum to 1");

  std::vector<size_t> order(count);
  std::iota(order.begin(), order.end(), size_t{0});
  std::mt19937_64 engine(seed);
  for (size_t i = count; i > 1; --i) {
    std::uniform_int_distribution<size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(engine)]);
  }
  std::vector<std::vector<size_t>> groups(fractions.size());
  size_t begin = 0;
  for (size_t g = 0; g < fractions.size(); ++g) {
    size_t size = g + 1 == fractions.size()
                      ? count - begin
                      : std::min(count - begin, static_cast<size_t>(std::llround(
                                                    fractions[g] * static_cast<double>(count))));
    groups[g].assign(order.begin() + static_cast<ptrdiff_t>(begin),
                     order.begin() + static_cast<ptrdiff_t>(begin + size));
    std::sort(groups[g].begin(), groups[g].end());
    begin += size;
  }
  return groups;
}

std::string FormatOovPercentage(const OovEntry& entry) {
  if (entry.unk_count == 0) return "0%";
  const double percent = 100.0 * entry.fraction();
  if (percent < 0.005) return "~0%";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", percent);
  return buf;
}

nlohmann::ordered_json OovReport::ToJson() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [name, entry] : per_dataset) {
    j[name] = {{"unk_count", entry.unk_count},
               {"total_tokens", entry.total_tokens},
               {"fraction", entry.fraction()},
               {"percentage", FormatOovPercentage(entry)}};
  }
  for (const auto& [name, message] : errors) j[name] = {{"error", message}};
  return j;
}

std::pair<OovReport, OovReport> OovReports(
    const std::vector<std::pair<std::string, CorpusOpener>>& corpora,
    const UnigramTokenizer& model_a, const UnigramTokenizer& model_b,
    const NormalizerConfig& config, int threads) {
  if (corpora.empty()) throw InvalidArgument("OOV report needs at least one corpus");
  OovReport a;
  OovReport b;
  for (const auto& [name, open] : corpora) {
    try {
      std::unique_ptr<std::istream> stream = open();
      RecordReader reader(*stream);
      OovEntry ea;
      OovEntry eb;
      std::vector<std::string> batch;
      std::vector<std::array<size_t, 4>> counts;
      size_t next_record = 0;
      while (reader.NextBatch(&batch, kBatch) > 0) {
        counts.assign(batch.size(), {});
        ForEachEncoded(batch, next_record, threads, [&](size_t i) {
          const NormalizedText text = Normalize(batch[i], config);
          const Encoding x = model_a.Encode(text);
          const Encoding y = model_b.Encode(text);
          counts[i] = {x.unk_count, x.ids.size(), y.unk_count, y.ids.size()};
        });
        for (const auto& c : counts) {
          ea.unk_count += c[0];
          ea.total_tokens += c[1];
          eb.unk_count += c[2];
          eb.total_tokens += c[3];
        }
        next_record += batch.size();
      }
      a.per_dataset[name] = ea;
      b.per_dataset[name] = eb;
    } catch (const Error& e) {
      a.errors[name] = e.what();
      b.errors[name] = e.what();
    }
  }
  return {std::move(a), std::move(b)};
}

size_t SegmentationDiff(RecordReader& reader, const UnigramTokenizer& model_a,
                        const UnigramTokenizer& model_b, const NormalizerConfig& config,
                        const std::function<void(const SegmentationDifference&)>& sink,
                        int threads) {
  std::vector<std::string> batch;
  std::vector<SegmentationDifference> diffs;
  size_t next_record = 0;
  while (reader.NextBatch(&batch, kBatch) > 0) {
    diffs.assign(batch.size(), {});
    std::vector<char> flags(batch.size(), 0);
    ForEachEncoded(batch, next_record, threads, [&](size_t i) {
      const NormalizedText text = Normalize(batch[i], config);
      Encoding x = model_a.Encode(text);
      Encoding y = model_b.Encode(text);
      if (x.surfaces != y.surfaces) {
        flags[i] = 1;
        diffs[i] = {next_record + i, std::move(x.surfaces), std::move(y.surfaces)};
      }
    });
    for (size_t i = 0; i < batch.size(); ++i) {
      if (flags[i]) sink(diffs[i]);
    }
    next_record += batch.size();
  }
  return next_record;
}

}  // namespace vocab_graft
