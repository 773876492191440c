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

#include "vocab_graft/piece_trie.h"

#include <deque>

namespace vocab_graft {

PieceTrie::PieceTrie(std::vector<std::pair<std::string, TokenId>> entries) {
  std::sort(entries.begin(), entries.end());
  nodes_.emplace_back();

  struct Pending {
    uint32_t node;
    size_t lo;
    size_t hi;
    size_t depth;
  };
  std::deque<Pending> queue;
  queue.push_back({0, 0, entries.size(), 0});
  while (!queue.empty()) {
    Pending p = queue.front();
    queue.pop_front();
    // Sorted order puts the entry that ends exactly here first.
    if (p.lo < p.hi && entries[p.lo].first.size() == p.depth) {
      nodes_[p.node].value = entries[p.lo].second;
      ++p.lo;
    }
    nodes_[p.node].edge_begin = static_cast<uint32_t>(labels_.size());
    size_t i = p.lo;
    while (i < p.hi) {
      const auto label = static_cast<uint8_t>(entries[i].first[p.depth]);
      size_t j = i + 1;
      while (j < p.hi && static_cast<uint8_t>(entries[j].first[p.depth]) == label) ++j;
      const auto child = static_cast<uint32_t>(nodes_.size());
      nodes_.emplace_back();
      labels_.push_back(label);
      targets_.push_back(child);
      queue.push_back({child, i, j, p.depth + 1});
      i = j;
    }
    nodes_[p.node].edge_end = static_cast<uint32_t>(labels_.size());
  }
}

}  // namespace vocab_graft
