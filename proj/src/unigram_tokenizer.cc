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

#include "vocab_graft/unigram_tokenizer.h"

#include <climits>
#include <unordered_set>

#include "vocab_graft/errors.h"
#include "vocab_graft/unicode.h"

namespace vocab_graft {
namespace {

constexpr size_t kCountBatch = 4096;

bool IsContinuationByte(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

// Best segmentation of the suffix starting at a byte position.
struct Cell {
  int32_t unk = INT32_MAX;
  double score = 0.0;
  int32_t tokens = 0;
  uint32_t length = 0;  // bytes of the first piece
  TokenId id = -1;

  bool reachable() const { return unk != INT32_MAX; }
};

bool Better(const Cell& a, const Cell& b) {
  if (a.unk != b.unk) return a.unk < b.unk;
  if (a.score != b.score) return a.score > b.score;
  if (a.tokens != b.tokens) return a.tokens < b.tokens;
  return a.length > b.length;
}

}  // namespace

UnigramTokenizer::UnigramTokenizer(const TokenizerModel& model, const EmojiSet& emoji)
    : model_(model) {
  std::vector<std::pair<std::string, TokenId>> normal;
  std::vector<std::pair<std::string, TokenId>> patterns;
  const auto pieces = model.pieces();
  for (size_t i = 0; i < pieces.size(); ++i) {
    const auto id = static_cast<TokenId>(i);
    if (pieces[i].kind == PieceKind::kNormal) normal.emplace_back(pieces[i].surface, id);
    if (pieces[i].kind == PieceKind::kUnscored) patterns.emplace_back(pieces[i].surface, id);
  }
  for (const auto& seq : emoji.sequences) {
    const std::string surface = EncodeUtf8(seq);
    const auto id = model.Find(surface);
    if (id && model.piece(*id).kind == PieceKind::kNormal) patterns.emplace_back(surface, *id);
  }
  // Lowercasing runs before carving, so cased emoji such as U+24C2 must also
  // match in their lowercased form.
  std::unordered_set<std::string> pattern_surfaces;
  for (const auto& [surface, id] : patterns) pattern_surfaces.insert(surface);
  const size_t original_patterns = patterns.size();
  for (size_t i = 0; i < original_patterns; ++i) {
    std::u32string scalars = DecodeUtf8(patterns[i].first);
    for (char32_t& c : scalars) c = SimpleLowercase(c);
    std::string lowered = EncodeUtf8(scalars);
    if (pattern_surfaces.insert(lowered).second) {
      patterns.emplace_back(std::move(lowered), patterns[i].second);
    }
  }
  normal_pieces_ = PieceTrie(std::move(normal));
  patterns_ = PieceTrie(std::move(patterns));
}

void UnigramTokenizer::Emit(TokenId id, size_t begin, size_t end, Encoding* out) const {
  out->ids.push_back(id);
  out->surfaces.push_back(model_.piece(id).surface);
  out->offsets.emplace_back(begin, end);
  if (id == model_.specials().unk_id) ++out->unk_count;
}

Encoding UnigramTokenizer::Encode(const NormalizedText& normalized) const {
  const std::string_view text = normalized.text;
  if (!IsValidUtf8(text)) throw FormatError("normalized text is not valid UTF-8");

  Encoding out;
  const auto& spaces = normalized.space_positions;
  size_t next_space = 0;
  size_t span_begin = 0;
  size_t pos = 0;
  auto flush = [&](size_t end) {
    if (end > span_begin) SegmentSpan(text.substr(span_begin, end - span_begin), span_begin, &out);
  };
  while (pos < text.size()) {
    while (next_space < spaces.size() && spaces[next_space] < pos) ++next_space;
    size_t scalar_len;
    DecodeScalarAt(text, pos, &scalar_len);
    if (next_space < spaces.size() && spaces[next_space] == pos) {
      flush(pos);
      const auto space_id = model_.specials().space_id;
      Emit(space_id ? *space_id : model_.specials().unk_id, pos, pos + scalar_len, &out);
      pos += scalar_len;
      span_begin = pos;
      continue;
    }
    if (const auto match = patterns_.LongestPrefix(text.substr(pos))) {
      flush(pos);
      Emit(match->second, pos, pos + match->first, &out);
      pos += match->first;
      span_begin = pos;
      continue;
    }
    pos += scalar_len;
  }
  flush(text.size());
  return out;
}

void UnigramTokenizer::SegmentSpan(std::string_view text, size_t base, Encoding* out) const {
  const size_t n = text.size();
  std::vector<Cell> best(n + 1);
  best[n].unk = 0;
  const TokenId unk_id = model_.specials().unk_id;

  for (size_t i = n; i-- > 0;) {
    if (IsContinuationByte(text[i])) continue;
    Cell& cell = best[i];
    normal_pieces_.ForEachPrefix(text.substr(i), [&](size_t len, TokenId id) {
      const Cell& rest = best[i + len];
      if (!rest.reachable()) return;
      Cell candidate{rest.unk, *model_.piece(id).score + rest.score, rest.tokens + 1,
                     static_cast<uint32_t>(len), id};
      if (!cell.reachable() || Better(candidate, cell)) cell = candidate;
    });
    size_t scalar_len;
    DecodeScalarAt(text, i, &scalar_len);
    const Cell& rest = best[i + scalar_len];
    Cell candidate{rest.unk + 1, rest.score, rest.tokens + 1,
                   static_cast<uint32_t>(scalar_len), unk_id};
    if (!cell.reachable() || Better(candidate, cell)) cell = candidate;
  }

  out->score += best[0].score;
  for (size_t i = 0; i < n; i += best[i].length) {
    Emit(best[i].id, base + i, base + i + best[i].length, out);
  }
}

Encoding UnigramTokenizer::EncodeRaw(std::string_view raw) const {
  return Encode(Normalize(raw, model_.normalizer_config()));
}

std::string UnigramTokenizer::Decode(std::span<const TokenId> ids) const {
  std::string out;
  const auto space_id = model_.specials().space_id;
  for (const TokenId id : ids) {
    if (!model_.IsValidId(id)) {
      throw InvalidArgument("token id " + std::to_string(id) + " out of range [0, " +
                            std::to_string(model_.size()) + ")");
    }
    if (space_id && id == *space_id) {
      out.push_back(' ');
    } else {
      out += model_.piece(id).surface;
    }
  }
  return out;
}

UnkCount CountUnk(const UnigramTokenizer& tokenizer, RecordReader& reader,
                  const NormalizerConfig& config, int threads) {
  UnkCount total;
  std::vector<std::string> batch;
  std::vector<std::pair<size_t, size_t>> partial;
  while (reader.NextBatch(&batch, kCountBatch) > 0) {
    partial.assign(batch.size(), {0, 0});
    const size_t first_record = total.records;
    std::vector<std::string> errors(batch.size());
    ParallelFor(batch.size(), threads, [&](size_t i) {
      try {
        const Encoding enc = tokenizer.Encode(Normalize(batch[i], config));
        partial[i] = {enc.unk_count, enc.ids.size()};
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    });
    for (size_t i = 0; i < batch.size(); ++i) {
      if (!errors[i].empty()) {
        throw FormatError("record " + std::to_string(first_record + i) + ": " + errors[i]);
      }
      total.unk_count += partial[i].first;
      total.total_tokens += partial[i].second;
    }
    total.records += batch.size();
  }
  return total;
}

}  // namespace vocab_graft
