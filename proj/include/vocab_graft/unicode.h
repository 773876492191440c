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

#ifndef VOCAB_GRAFT_UNICODE_H_
#define VOCAB_GRAFT_UNICODE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace vocab_graft {

// Inclusive range of Unicode scalar values.
struct ScalarRange {
  char32_t lo = 0;
  char32_t hi = 0;

  bool Contains(char32_t c) const { return lo <= c && c <= hi; }
  bool operator==(const ScalarRange&) const = default;
};

// Parses "0E00..0E7F" (or a single code point "0E01") as hexadecimal.
// Throws InvalidArgument on malformed input or lo > hi.
ScalarRange ParseScalarRange(std::string_view text);
std::string FormatScalarRange(const ScalarRange& range);

bool IsValidUtf8(std::string_view text);

// Length in bytes of the UTF-8 sequence starting with `lead`, or 0 when
// `lead` is a continuation byte or invalid.
size_t Utf8SequenceLength(unsigned char lead);

// Decodes one scalar at `pos`. Undefined on invalid input; callers validate
// first.
char32_t DecodeScalarAt(std::string_view text, size_t pos, size_t* length);

// Throws FormatError if `text` is not valid UTF-8.
std::u32string DecodeUtf8(std::string_view text);

void AppendUtf8(std::string* out, char32_t scalar);
std::string EncodeUtf8(std::u32string_view scalars);

// Unicode simple (1:1) lowercase mapping.
char32_t SimpleLowercase(char32_t scalar);

// Parses a hexadecimal code point ("1F600"). Returns nullopt for malformed
// text, surrogates and values above U+10FFFF.
std::optional<char32_t> ParseCodePoint(std::string_view hex);

}  // namespace vocab_graft

#endif  // VOCAB_GRAFT_UNICODE_H_
