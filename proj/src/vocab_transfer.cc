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

#include "vocab_graft/vocab_transfer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "vocab_graft/errors.h"

namespace vocab_graft {

void TransferPolicy::Validate() const {
  std::vector<ScalarRange> sorted = excluded_blocks;
  for (const auto& r : sorted) {
    if (r.lo > r.hi) {
      throw InvalidArgument("excluded block " + FormatScalarRange(r) + " has lo > hi");
    }
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const ScalarRange& a, const ScalarRange& b) { return a.lo < b.lo; });
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].lo <= sorted[i - 1].hi) {
      throw InvalidArgument("excluded blocks " + FormatScalarRange(sorted[i - 1]) +
                            " and " + FormatScalarRange(sorted[i]) + " overlap");
    }
  }
}

bool ScriptFilter(std::string_view surface, const TransferPolicy& policy) {
  for (size_t i = 0; i < surface.size();) {
    size_t len;
    const char32_t c = DecodeScalarAt(surface, i, &len);
    i += len;
    for (const auto& block : policy.excluded_blocks) {
      if (block.Contains(c)) return true;
    }
  }
  return false;
}

TransferResult Transfer(const TokenizerModel& recipient, const TokenizerModel& donor,
                        const TransferPolicy& policy, const EmojiSet& emoji) {
  policy.Validate();
  if (policy.inject_emoji && emoji.empty()) {
    throw InvalidArgument("emoji injection is enabled but the emoji set is empty");
  }

  TransferReport report;
  report.recipient_size_before = recipient.size();
  report.donor_size = donor.size();
  report.boundary_id = recipient.size();
  report.emoji_source_version = policy.inject_emoji ? emoji.source_version : "";

  std::vector<VocabPiece> pieces(recipient.pieces().begin(), recipient.pieces().end());
  std::unordered_set<std::string> present;
  present.reserve(recipient.size() + donor.size() + emoji.size());
  for (const auto& p : recipient.pieces()) present.insert(p.surface);

  double fallback_score = std::numeric_limits<double>::infinity();
  for (const auto& p : recipient.pieces()) {
    if (p.kind == PieceKind::kNormal) fallback_score = std::min(fallback_score, *p.score);
  }

  bool donor_has_normal = false;
  for (const auto& p : donor.pieces()) {
    if (p.kind != PieceKind::kNormal) {
      ++report.skipped_control;
      continue;
    }
    donor_has_normal = true;
    if (present.count(p.surface) != 0) {
      ++report.skipped_duplicate;
      continue;
    }
    if (ScriptFilter(p.surface, policy)) {
      ++report.skipped_script;
      continue;
    }
    VocabPiece copy = p;
    if (!policy.copy_scores && std::isfinite(fallback_score)) copy.score = fallback_score;
    present.insert(p.surface);
    pieces.push_back(std::move(copy));
    ++report.copied;
  }
  if (!donor_has_normal) {
    report.warnings.push_back("donor has no normal pieces; nothing transferred");
  }

  if (policy.inject_emoji) {
    for (const auto& seq : emoji.sequences) {
      if (seq.empty()) continue;
      std::string surface = EncodeUtf8(seq);
      if (!present.insert(surface).second) continue;
      pieces.push_back({std::move(surface), std::nullopt, PieceKind::kUnscored});
      ++report.emoji_added;
    }
  }

  report.recipient_size_after = pieces.size();
  TokenizerModel model(std::move(pieces), recipient.specials(), recipient.normalizer_config());
  return {std::move(model), std::move(report)};
}

nlohmann::ordered_json TransferReport::ToJson() const {
  nlohmann::ordered_json j;
  j["recipient_size_before"] = recipient_size_before;
  j["donor_size"] = donor_size;
  j["copied"] = copied;
  j["skipped_duplicate"] = skipped_duplicate;
  j["skipped_script"] = skipped_script;
  j["skipped_control"] = skipped_control;
  j["emoji_added"] = emoji_added;
  j["recipient_size_after"] = recipient_size_after;
  j["boundary_id"] = boundary_id;
  j["emoji_source_version"] = emoji_source_version;
  j["warnings"] = warnings;
  return j;
}

}  // namespace vocab_graft
