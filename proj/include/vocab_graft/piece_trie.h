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

#ifndef VOCAB_GRAFT_PIECE_TRIE_H_
#define VOCAB_GRAFT_PIECE_TRIE_H_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vocab_graft/model_store.h"

namespace vocab_graft {

// Static byte trie over piece surfaces. Children of each node are stored as
// one contiguous, label-sorted edge block.
class PieceTrie {
 public:
  PieceTrie() = default;
  // Surfaces must be unique and non-empty.
  explicit PieceTrie(std::vector<std::pair<std::string, TokenId>> entries);

  bool empty() const { return nodes_.size() <= 1; }

  // Calls fn(length_in_bytes, id) for every entry that is a prefix of
  // `text`, shortest first.
  template <typename Fn>
  void ForEachPrefix(std::string_view text, Fn&& fn) const {
    if (nodes_.empty()) return;
    uint32_t node = 0;
    for (size_t i = 0; i < text.size(); ++i) {
      node = Child(node, static_cast<uint8_t>(text[i]));
      if (node == kNoNode) return;
      if (nodes_[node].value >= 0) fn(i + 1, nodes_[node].value);
    }
  }

  std::optional<std::pair<size_t, TokenId>> LongestPrefix(std::string_view text) const {
    std::optional<std::pair<size_t, TokenId>> best;
    ForEachPrefix(text, [&](size_t len, TokenId id) { best.emplace(len, id); });
    return best;
  }

 private:
  static constexpr uint32_t kNoNode = UINT32_MAX;

  struct Node {
    uint32_t edge_begin = 0;
    uint32_t edge_end = 0;
    TokenId value = -1;
  };

  uint32_t Child(uint32_t node, uint8_t label) const {
    const Node& n = nodes_[node];
    const auto first = labels_.begin() + n.edge_begin;
    const auto last = labels_.begin() + n.edge_end;
    const auto it = std::lower_bound(first, last, label);
    if (it == last || *it != label) return kNoNode;
    return targets_[static_cast<size_t>(it - labels_.begin())];
  }

  std::vector<Node> nodes_;
  std::vector<uint8_t> labels_;
  std::vector<uint32_t> targets_;
};

}  // namespace vocab_graft

#endif  // VOCAB_GRAFT_PIECE_TRIE_H_
