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

#include "vocab_graft/normalizer.h"

#include "vocab_graft/unicode.h"

namespace vocab_graft {
namespace {

bool IsPreservedSpace(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == kSpaceMarker;
}

}  // namespace

NormalizedText Normalize(std::string_view raw, const NormalizerConfig& config) {
  config.Validate();
  std::u32string scalars = DecodeUtf8(raw);
  for (char32_t& c : scalars) {
    if (config.lowercase) c = SimpleLowercase(c);
    if (config.preserve_space && IsPreservedSpace(c)) c = kSpaceMarker;
  }

  NormalizedText out;
  out.text.reserve(raw.size());
  const size_t limit = static_cast<size_t>(config.max_char_repeat);
  size_t i = 0;
  while (i < scalars.size()) {
    size_t j = i + 1;
    while (j < scalars.size() && scalars[j] == scalars[i]) ++j;
    const size_t copies = (j - i) > limit ? 1 : (j - i);
    for (size_t k = 0; k < copies; ++k) {
      if (config.preserve_space && scalars[i] == kSpaceMarker) {
        out.space_positions.push_back(out.text.size());
      }
      AppendUtf8(&out.text, scalars[i]);
    }
    i = j;
  }
  return out;
}

}  // namespace vocab_graft
