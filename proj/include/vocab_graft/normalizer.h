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

#ifndef VOCAB_GRAFT_NORMALIZER_H_
#define VOCAB_GRAFT_NORMALIZER_H_

#include <string>
#include <string_view>
#include <vector>

#include "vocab_graft/model_store.h"

namespace vocab_graft {

// Stand-in written into normalized text for each preserved space. The
// tokenizer maps every marked position to the model's space token.
inline constexpr char32_t kSpaceMarker = U'▁';

struct NormalizedText {
  std::string text;
  // Byte offsets into `text` of every space marker, ascending.
  std::vector<size_t> space_positions;

  bool operator==(const NormalizedText&) const = default;
};

// Lowercases (optional), maps U+0020, TAB, LF, CR and kSpaceMarker itself to
// kSpaceMarker (when preserve_space), then collapses every run of one scalar
// longer than max_char_repeat to a single copy. Throws FormatError on invalid
// UTF-8.
NormalizedText Normalize(std::string_view raw, const NormalizerConfig& config);

}  // namespace vocab_graft

#endif  // VOCAB_GRAFT_NORMALIZER_H_
