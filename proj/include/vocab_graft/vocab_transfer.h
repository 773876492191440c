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

// Grafting donor vocabulary onto a recipient unigram model.
//
// The output vocabulary is
//
//   recipient pieces (ids unchanged)
//   ++ donor Normal pieces that pass the filters, in donor id order,
//      scores copied verbatim
//   ++ emoji sequences not yet present, as Unscored pieces in code-point
//      order
//
// so every id below `boundary_id` still names the recipient's piece and
// every id at or above it is new. A donor piece is checked, in order:
//   1. non-Normal kind (control, unknown, unscored) -> skipped_control
//   2. surface already in the growing output        -> skipped_duplicate
//   3. any scalar inside an excluded block           -> skipped_script

#ifndef VOCAB_GRAFT_VOCAB_TRANSFER_H_
#define VOCAB_GRAFT_VOCAB_TRANSFER_H_

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vocab_graft/emoji_set.h"
#include "vocab_graft/model_store.h"
#include "vocab_graft/unicode.h"

namespace vocab_graft {

inline constexpr ScalarRange kThaiBlock{0x0E00, 0x0E7F};

struct TransferPolicy {
  std::vector<ScalarRange> excluded_blocks{kThaiBlock};
  // When false, copied pieces take the lowest Normal score of the recipient
  // instead of their donor score.
  bool copy_scores = true;
  bool inject_emoji = true;

  // Throws InvalidArgument on lo > hi or overlapping ranges.
  void Validate() const;
};

struct TransferReport {
  size_t recipient_size_before = 0;
  size_t donor_size = 0;
  size_t copied = 0;
  size_t skipped_duplicate = 0;
  size_t skipped_script = 0;
  size_t skipped_control = 0;
  size_t emoji_added = 0;
  size_t recipient_size_after = 0;
  size_t boundary_id = 0;
  std::string emoji_source_version;
  std::vector<std::string> warnings;

  nlohmann::ordered_json ToJson() const;
};

struct TransferResult {
  TokenizerModel model;
  TransferReport report;
};

// True when `surface` contains a scalar inside any excluded block, i.e. the
// piece must not be transferred. `surface` must be valid UTF-8.
bool ScriptFilter(std::string_view surface, const TransferPolicy& policy);

TransferResult Transfer(const TokenizerModel& recipient, const TokenizerModel& donor,
                        const TransferPolicy& policy, const EmojiSet& emoji);

}  // namespace vocab_graft

#endif  // VOCAB_GRAFT_VOCAB_TRANSFER_H_
