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

#ifndef VOCAB_GRAFT_EMOJI_SET_H_
#define VOCAB_GRAFT_EMOJI_SET_H_

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace vocab_graft {

// Emoji scalar sequences, kept in code-point order.
struct EmojiSet {
  std::set<std::u32string> sequences;
  std::string source_version;

  bool empty() const { return sequences.empty(); }
  size_t size() const { return sequences.size(); }
};

struct EmojiLoadOptions {
  // When non-empty, only lines whose second field (type or status, e.g.
  // "fully-qualified", "RGI_Emoji_ZWJ_Sequence") is listed are kept.
  std::vector<std::string> types;
};

// Parses the Unicode emoji data line format shared by emoji-sequences.txt,
// emoji-zwj-sequences.txt and emoji-test.txt:
//
//   code_points ; type [; description] # comment
//
// where code_points is a space-separated sequence or a "lo..hi" range that
// expands to single-scalar sequences. Throws FormatError with the line
// number. The version comes from a "# Version: X" header line.
EmojiSet ParseEmojiSet(std::string_view content, const EmojiLoadOptions& options = {});
EmojiSet LoadEmojiSet(const std::filesystem::path& path,
                      const EmojiLoadOptions& options = {});

}  // namespace vocab_graft

#endif  // VOCAB_GRAFT_EMOJI_SET_H_
