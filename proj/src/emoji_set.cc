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

#include "vocab_graft/emoji_set.h"

#include <algorithm>

#include "vocab_graft/errors.h"
#include "vocab_graft/model_store.h"
#include "vocab_graft/unicode.h"

namespace vocab_graft {
namespace {

std::string_view Trim(std::string_view s) {
  const auto space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

[[noreturn]] void FailAt(size_t line, const std::string& what) {
  throw FormatError("emoji data line " + std::to_string(line) + ": " + what);
}

}  // namespace

EmojiSet ParseEmojiSet(std::string_view content, const EmojiLoadOptions& options) {
  EmojiSet set;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (const size_t hash = line.find('#'); hash != std::string_view::npos) {
      const std::string_view comment = Trim(line.substr(hash + 1));
      constexpr std::string_view kVersionKey = "Version:";
      if (hash == 0 && comment.starts_with(kVersionKey) && set.source_version.empty()) {
        set.source_version = std::string(Trim(comment.substr(kVersionKey.size())));
      }
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;

    const size_t semi = line.find(';');
    if (semi == std::string_view::npos) FailAt(line_no, "missing ';' field separator");
    const std::string_view points = Trim(line.substr(0, semi));
    std::string_view type = line.substr(semi + 1);
    type = Trim(type.substr(0, type.find(';')));
    if (points.empty()) FailAt(line_no, "empty code point field");
    if (!options.types.empty() &&
        std::find(options.types.begin(), options.types.end(), type) ==
            options.types.end()) {
      continue;
    }

    if (points.find("..") != std::string_view::npos) {
      if (points.find(' ') != std::string_view::npos) {
        FailAt(line_no, "range mixed with a sequence");
      }
      ScalarRange range;
      try {
        range = ParseScalarRange(points);
      } catch (const InvalidArgument& e) {
        FailAt(line_no, e.what());
      }
      for (char32_t c = range.lo;; ++c) {
        if (c < 0xD800 || c > 0xDFFF) set.sequences.insert(std::u32string(1, c));
        if (c == range.hi) break;
      }
      continue;
    }

    std::u32string sequence;
    size_t start = 0;
    while (start < points.size()) {
      size_t stop = points.find(' ', start);
      if (stop == std::string_view::npos) stop = points.size();
      const std::string_view token = points.substr(start, stop - start);
      start = stop + 1;
      if (token.empty()) continue;
      const auto cp = ParseCodePoint(token);
      if (!cp || *cp == 0) {
        FailAt(line_no, "bad code point '" + std::string(token) + "'");
      }
      sequence.push_back(*cp);
    }
    set.sequences.insert(std::move(sequence));
  }
  return set;
}

EmojiSet LoadEmojiSet(const std::filesystem::path& path, const EmojiLoadOptions& options) {
  const std::string content = ReadFileBytes(path);
  try {
    EmojiSet set = ParseEmojiSet(content, options);
    if (set.source_version.empty()) set.source_version = path.filename().string();
    return set;
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace vocab_graft
