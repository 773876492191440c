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

#ifndef VOCAB_GRAFT_MLM_MASKING_H_
#define VOCAB_GRAFT_MLM_MASKING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "vocab_graft/model_store.h"

namespace vocab_graft {

// Label value at positions the loss ignores.
inline constexpr TokenId kIgnoreLabel = -100;

enum class MaskBranch : uint8_t { kNone, kMask, kRandom, kKeep };

struct MaskingConfig {
  double mask_ratio = 0.15;
  double p_mask = 0.80;
  double p_random = 0.10;
  double p_keep = 0.10;
  TokenId mask_id = 0;
  TokenId unk_id = 0;
  // Random replacements are drawn uniformly from [lo, hi), skipping
  // `special_ids`.
  TokenId maskable_lo = 0;
  TokenId maskable_hi = 0;
  // Never selected for masking and never drawn as a replacement.
  std::vector<TokenId> special_ids;
  uint64_t seed = 0;

  // Throws InvalidArgument: ratio outside (0, 1], negative branch
  // probabilities, branch sum != 1, empty replacement range.
  void Validate() const;

  // Defaults with ids from `model`: every Control and Unknown piece is
  // special, replacements span the whole vocabulary. Throws
  // InvalidArgument if the model has no mask token.
  static MaskingConfig ForModel(const TokenizerModel& model, uint64_t seed);
};

struct MaskedBatch {
  std::vector<TokenId> input_ids;
  std::vector<TokenId> labels;
  std::vector<bool> selected;
  std::vector<MaskBranch> branches;
};

// Number of positions to select: max(1, round_half_away(ratio * n)). A
// product within 1e-9 of a half is treated as an exact half, so decimal
// ratios like 0.15 round as written.
size_t SelectionCount(double ratio, size_t selectable);

// Corrupts one sequence. The random stream is keyed by (seed, epoch,
// sequence_index), so the result is reproducible and independent of which
// worker runs it. Throws InvalidArgument when every position is special.
MaskedBatch MaskSequence(std::span<const TokenId> ids, const MaskingConfig& config,
                         uint64_t epoch, uint64_t sequence_index);

class MaskingStats {
 public:
  void Add(const MaskedBatch& batch);

  size_t tokens() const { return tokens_; }
  size_t selected() const { return selected_; }
  size_t masked() const { return masked_; }
  size_t randomized() const { return randomized_; }
  size_t kept() const { return kept_; }

  // The observed_* accessors throw InvalidArgument when nothing was added.
  double observed_ratio() const;
  double observed_p_mask() const;
  double observed_p_random() const;
  double observed_p_keep() const;

  // Pearson chi-square of the branch counts against the expected
  // probabilities (2 degrees of freedom).
  double ChiSquare(double p_mask, double p_random, double p_keep) const;

  nlohmann::ordered_json ToJson() const;

 private:
  void RequireData() const;

  size_t batches_ = 0;
  size_t tokens_ = 0;
  size_t selected_ = 0;
  size_t masked_ = 0;
  size_t randomized_ = 0;
  size_t kept_ = 0;
};

}  // namespace vocab_graft

#endif  // VOCAB_GRAFT_MLM_MASKING_H_
