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

#include "vocab_graft/unicode.h"

#include <unicode/uchar.h>

#include <charconv>
#include <cstdio>
#include <string>

#include "vocab_graft/errors.h"

namespace vocab_graft {
namespace {

bool IsScalar(char32_t c) {
  return c <= 0x10FFFF && !(c >= 0xD800 && c <= 0xDFFF);
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::optional<char32_t> ParseCodePoint(std::string_view hex) {
  hex = Trim(hex);
  if (hex.size() >= 2 && (hex[0] == 'U' || hex[0] == 'u') && hex[1] == '+') {
    hex.remove_prefix(2);
  }
  if (hex.empty() || hex.size() > 6) return std::nullopt;
  uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), value, 16);
  if (ec != std::errc() || ptr != hex.data() + hex.size()) return std::nullopt;
  if (!IsScalar(value)) return std::nullopt;
  return static_cast<char32_t>(value);
}

ScalarRange ParseScalarRange(std::string_view text) {
  const std::string_view trimmed = Trim(text);
  const size_t dots = trimmed.find("..");
  std::optional<char32_t> lo;
  std::optional<char32_t> hi;
  if (dots == std::string_view::npos) {
    lo = hi = ParseCodePoint(trimmed);
  } else {
    lo = ParseCodePoint(trimmed.substr(0, dots));
    hi = ParseCodePoint(trimmed.substr(dots + 2));
  }
  if (!lo || !hi) {
    throw InvalidArgument("malformed scalar range '" + std::string(text) + "'");
  }
  if (*lo > *hi) {
    throw InvalidArgument("scalar range '" + std::string(text) +
                          "' has lo > hi");
  }
  return {*lo, *hi};
}

std::string FormatScalarRange(const ScalarRange& range) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04X..%04X",
                static_cast<unsigned>(range.lo), static_cast<unsigned>(range.hi));
  return buf;
}

size_t Utf8SequenceLength(unsigned char lead) {
  if (lead < 0x80) return 1;
  if (lead < 0xC2) return 0;
  if (lead < 0xE0) return 2;
  if (lead < 0xF0) return 3;
  if (lead < 0xF5) return 4;
  return 0;
}

bool IsValidUtf8(std::string_view text) {
  size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    const size_t len = Utf8SequenceLength(lead);
    if (len == 0 || i + len > text.size()) return false;
    for (size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) return false;
    }
    if (len > 1) {
      size_t unused;
      const char32_t c = DecodeScalarAt(text, i, &unused);
      // Overlong three/four byte forms and surrogates.
      if ((len == 3 && c < 0x800) || (len == 4 && c < 0x10000) || !IsScalar(c)) {
        return false;
      }
    }
    i += len;
  }
  return true;
}

char32_t DecodeScalarAt(std::string_view text, size_t pos, size_t* length) {
  const auto b0 = static_cast<unsigned char>(text[pos]);
  const size_t len = Utf8SequenceLength(b0);
  *length = len == 0 ? 1 : len;
  switch (len) {
    case 1:
      return b0;
    case 2:
      return (char32_t{b0 & 0x1Fu} << 6) |
             (static_cast<unsigned char>(text[pos + 1]) & 0x3F);
    case 3:
      return (char32_t{b0 & 0x0Fu} << 12) |
             ((static_cast<unsigned char>(text[pos + 1]) & 0x3Fu) << 6) |
             (static_cast<unsigned char>(text[pos + 2]) & 0x3F);
    case 4:
      return (char32_t{b0 & 0x07u} << 18) |
             ((static_cast<unsigned char>(text[pos + 1]) & 0x3Fu) << 12) |
             ((static_cast<unsigned char>(text[pos + 2]) & 0x3Fu) << 6) |
             (static_cast<unsigned char>(text[pos + 3]) & 0x3F);
    default:
      return 0xFFFD;
  }
}

std::u32string DecodeUtf8(std::string_view text) {
  if (!IsValidUtf8(text)) throw FormatError("invalid UTF-8 input");
  std::u32string out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size();) {
    size_t len;
    out.push_back(DecodeScalarAt(text, i, &len));
    i += len;
  }
  return out;
}

void AppendUtf8(std::string* out, char32_t c) {
  if (c < 0x80) {
    out->push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out->push_back(static_cast<char>(0xC0 | (c >> 6)));
    out->push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out->push_back(static_cast<char>(0xE0 | (c >> 12)));
    out->push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out->push_back(static_cast<char>(0xF0 | (c >> 18)));
    out->push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

std::string EncodeUtf8(std::u32string_view scalars) {
  std::string out;
  out.reserve(scalars.size() * 2);
  for (char32_t c : scalars) AppendUtf8(&out, c);
  return out;
}

char32_t SimpleLowercase(char32_t scalar) {
  return static_cast<char32_t>(u_tolower(static_cast<UChar32>(scalar)));
}

}  // namespace vocab_graft
