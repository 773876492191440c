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

#ifndef VOCAB_GRAFT_UNIGRAM_TOKENIZER_H_
#define VOCAB_GRAFT_UNIGRAM_TOKENIZER_H_

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vocab_graft/corpus_reader.h"
#include "vocab_graft/emoji_set.h"
#include "vocab_graft/model_store.h"
#include "vocab_graft/normalizer.h"
#include "vocab_graft/piece_trie.h"

namespace vocab_graft {

struct Encoding {
  std::vector<TokenId> ids;
  std::vector<std::string> surfaces;
  // [begin, end) byte offsets into the normalized text. They partition it.
  std::vector<std::pair<size_t, size_t>> offsets;
  size_t unk_count = 0;
  // Sum of the scores of the Normal pieces chosen by segmentation.
  double score = 0.0;
};

// Maximum-likelihood unigram segmenter.
//
// Encoding first carves the normalized text into three kinds of spans:
//   1. each preserved space position becomes the space token (or <unk> if
//      the model has no space token);
//   2. the longest emoji sequence starting at a position becomes its piece;
//      the pattern set is every Unscored piece of the model plus every
//      sequence of `emoji` that the model contains;
//   3. the remaining maximal spans are segmented by Viterbi over the Normal
//      pieces.
//
// Viterbi ranks segmentations lexicographically by
//   (fewest <unk>, highest score sum, fewest tokens, longest first piece).
// A scalar that no piece can cover is emitted as a single-scalar <unk>.
//
// The tokenizer keeps a reference to `model`, which must outlive it.
class UnigramTokenizer {
 public:
  UnigramTokenizer(const TokenizerModel& model, const EmojiSet& emoji);

  const TokenizerModel& model() const { return model_; }

  // Throws FormatError if `text.text` is not valid UTF-8.
  Encoding Encode(const NormalizedText& text) const;

  // Normalizes with the model's own normalizer config, then encodes.
  Encoding EncodeRaw(std::string_view raw) const;

  // Concatenates surfaces, rendering the space token as U+0020. Throws
  // InvalidArgument on an out-of-range id.
  std::string Decode(std::span<const TokenId> ids) const;

 private:
  void SegmentSpan(std::string_view text, size_t base, Encoding* out) const;
  void Emit(TokenId id, size_t begin, size_t end, Encoding* out) const;

  const TokenizerModel& model_;
  PieceTrie normal_pieces_;
  PieceTrie patterns_;
};

struct UnkCount {
  size_t unk_count = 0;
  size_t total_tokens = 0;
  size_t records = 0;

  double fraction() const {
    return total_tokens == 0 ? 0.0
                             : static_cast<double>(unk_count) /
                                   static_cast<double>(total_tokens);
  }
};

// Normalizes and encodes every record, summing <unk> and token counts.
// Records are encoded on up to `threads` workers; the result does not
// depend on the thread count.
UnkCount CountUnk(const UnigramTokenizer& tokenizer, RecordReader& reader,
                  const NormalizerConfig& config, int threads = 1);

}  // namespace vocab_graft

#endif  // VOCAB_GRAFT_UNIGRAM_TOKENIZER_H_
