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

#include "vocab_graft/mlm_masking.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "vocab_graft/errors.h"

namespace vocab_graft {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

uint64_t StreamKey(uint64_t seed, uint64_t epoch, uint64_t index) {
  return SplitMix64(SplitMix64(SplitMix64(seed) ^ epoch) ^ index);
}

}  // namespace

void MaskingConfig::Validate() const {
  if (!(mask_ratio > 0.0 && mask_ratio <= 1.0)) {
    throw InvalidArgument("mask_ratio must lie in (0, 1]");
  }
  if (p_mask < 0 || p_random < 0 || p_keep < 0) {
    throw InvalidArgument("branch probabilities must be non-negative");
  }
  if (std::abs(p_mask + p_random + p_keep - 1.0) > 1e-9) {
    throw InvalidArgument("p_mask + p_random + p_keep must equal 1");
  }
  if (p_random > 0) {
    const std::unordered_set<TokenId> specials(special_ids.begin(), special_ids.end());
    size_t blocked = 0;
    for (const TokenId id : specials) blocked += (id >= maskable_lo && id < maskable_hi);
    if (maskable_hi <= maskable_lo ||
        blocked >= static_cast<size_t>(maskable_hi - maskable_lo)) {
      throw InvalidArgument("random replacement range has no non-special id");
    }
  }
}

MaskingConfig MaskingConfig::ForModel(const TokenizerModel& model, uint64_t seed) {
  MaskingConfig config;
  if (!model.specials().mask_id) throw InvalidArgument("model has no mask token");
  config.mask_id = *model.specials().mask_id;
  config.unk_id = model.specials().unk_id;
  config.maskable_lo = 0;
  config.maskable_hi = static_cast<TokenId>(model.size());
  for (size_t i = 0; i < model.size(); ++i) {
    const PieceKind kind = model.pieces()[i].kind;
    if (kind == PieceKind::kControl || kind == PieceKind::kUnknown) {
      config.special_ids.push_back(static_cast<TokenId>(i));
    }
  }
  config.seed = seed;
  return config;
}

size_t SelectionCount(double ratio, size_t selectable) {
  if (selectable == 0) return 0;
  const double product = ratio * static_cast<double>(selectable);
  double whole = std::floor(product);
  const double frac = product - whole;
  if (std::abs(frac - 0.5) <= 1e-9 * std::max(1.0, product) || frac > 0.5) whole += 1.0;
  const auto count = static_cast<size_t>(whole);
  return std::clamp<size_t>(count, 1, selectable);
}

MaskedBatch MaskSequence(std::span<const TokenId> ids, const MaskingConfig& config,
                         uint64_t epoch, uint64_t sequence_index) {
  config.Validate();
  const std::unordered_set<TokenId> specials(config.special_ids.begin(),
                                             config.special_ids.end());
  std::vector<size_t> candidates;
  candidates.reserve(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (specials.count(ids[i]) == 0) candidates.push_back(i);
  }
  if (candidates.empty()) {
    throw InvalidArgument("sequence has no selectable (non-special) positions");
  }

  std::mt19937_64 engine(StreamKey(config.seed, epoch, sequence_index));
  const size_t k = SelectionCount(config.mask_ratio, candidates.size());
  // Partial Fisher-Yates: the first k entries become a uniform k-subset.
  for (size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<size_t> pick(i, candidates.size() - 1);
    std::swap(candidates[i], candidates[pick(engine)]);
  }

  MaskedBatch batch;
  batch.input_ids.assign(ids.begin(), ids.end());
  batch.labels.assign(ids.size(), kIgnoreLabel);
  batch.selected.assign(ids.size(), false);
  batch.branches.assign(ids.size(), MaskBranch::kNone);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<TokenId> replacement(
      config.maskable_lo, std::max(config.maskable_lo, config.maskable_hi - 1));
  std::sort(candidates.begin(), candidates.begin() + static_cast<ptrdiff_t>(k));
  for (size_t n = 0; n < k; ++n) {
    const size_t pos = candidates[n];
    batch.selected[pos] = true;
    batch.labels[pos] = ids[pos];
    const double u = unit(engine);
    if (u < config.p_mask) {
      batch.branches[pos] = MaskBranch::kMask;
      batch.input_ids[pos] = config.mask_id;
    } else if (u < config.p_mask + config.p_random) {
      batch.branches[pos] = MaskBranch::kRandom;
      TokenId draw;
      do {
        draw = replacement(engine);
      } while (specials.count(draw) != 0);
      batch.input_ids[pos] = draw;
    } else {
      batch.branches[pos] = MaskBranch::kKeep;
    }
  }
  return batch;
}

void MaskingStats::Add(const MaskedBatch& batch) {
  ++batches_;
  tokens_ += batch.input_ids.size();
  for (const MaskBranch b : batch.branches) {
    switch (b) {
      case MaskBranch::kNone: break;
      case MaskBranch::kMask: ++selected_; ++masked_; break;
      case MaskBranch::kRandom: ++selected_; ++randomized_; break;
      case MaskBranch::kKeep: ++selected_; ++kept_; break;
    }
  }
}

void MaskingStats::RequireData() const {
  if (batches_ == 0 || tokens_ == 0) throw InvalidArgument("masking stats over an empty stream");
}

double MaskingStats::observed_ratio() const {
  RequireData();
  return static_cast<double>(selected_) / static_cast<double>(tokens_);
}

double MaskingStats::observed_p_mask() const {
  RequireData();
  return selected_ == 0 ? 0.0 : static_cast<double>(masked_) / static_cast<double>(selected_);
}

double MaskingStats::observed_p_random() const {
  RequireData();
  return selected_ == 0 ? 0.0
                        : static_cast<double>(randomized_) / static_cast<double>(selected_);
}

double MaskingStats::observed_p_keep() const {
  RequireData();
  return selected_ == 0 ? 0.0 : static_cast<double>(kept_) / static_cast<double>(selected_);
}

double MaskingStats::ChiSquare(double p_mask, double p_random, double p_keep) const {
  const double n = static_cast<double>(selected_);
  double chi = 0.0;
  const std::pair<size_t, double> cells[] = {
      {masked_, p_mask}, {randomized_, p_random}, {kept_, p_keep}};
  for (const auto& [observed, p] : cells) {
    const double expected = n * p;
    if (expected == 0.0) continue;
    const double delta = static_cast<double>(observed) - expected;
    chi += delta * delta / expected;
  }
  return chi;
}

nlohmann::ordered_json MaskingStats::ToJson() const {
  nlohmann::ordered_json j;
  j["sequences"] = batches_;
  j["tokens"] = tokens_;
  j["selected"] = selected_;
  j["masked"] = masked_;
  j["randomized"] = randomized_;
  j["kept"] = kept_;
  j["observed_ratio"] = observed_ratio();
  j["observed_p_mask"] = observed_p_mask();
  j["observed_p_random"] = observed_p_random();
  j["observed_p_keep"] = observed_p_keep();
  return j;
}

}  // namespace vocab_graft
