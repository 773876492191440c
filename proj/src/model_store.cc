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

#include "vocab_graft/model_store.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <utility>

#include "vocab_graft/errors.h"
#include "vocab_graft/unicode.h"

namespace vocab_graft {
namespace {

constexpr std::string_view kFormatName = "vocab-graft-model";
constexpr int kFormatVersion = 1;
constexpr std::string_view kNoScore = "\xE2\x88\x85";  // U+2205

std::string Escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::optional<std::string> Unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out.push_back(s[i]);
      continue;
    }
    if (++i == s.size()) return std::nullopt;
    switch (s[i]) {
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case '\\': out.push_back('\\'); break;
      default: return std::nullopt;
    }
  }
  return out;
}

std::string FormatScore(double score) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), score);
  return std::string(buf, ptr);
}

std::string FormatOptionalId(const std::optional<TokenId>& id) {
  return id ? std::to_string(*id) : std::string("none");
}

[[noreturn]] void FailAt(size_t line, const std::string& what) {
  throw FormatError("line " + std::to_string(line) + ": " + what);
}

template <typename T>
bool ParseNumber(std::string_view s, T* out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool ParseBool(std::string_view s, bool* out) {
  if (s == "true") {
    *out = true;
    return true;
  }
  if (s == "false") {
    *out = false;
    return true;
  }
  return false;
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::optional<TokenId> FindUnknown(std::span<const VocabPiece> pieces) {
  for (size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].kind == PieceKind::kUnknown) return static_cast<TokenId>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view PieceKindName(PieceKind kind) {
  switch (kind) {
    case PieceKind::kNormal: return "normal";
    case PieceKind::kUnknown: return "unknown";
    case PieceKind::kControl: return "control";
    case PieceKind::kUnscored: return "unscored";
  }
  return "normal";
}

std::optional<PieceKind> ParsePieceKind(std::string_view name) {
  if (name == "normal") return PieceKind::kNormal;
  if (name == "unknown") return PieceKind::kUnknown;
  if (name == "control") return PieceKind::kControl;
  if (name == "unscored") return PieceKind::kUnscored;
  return std::nullopt;
}

void NormalizerConfig::Validate() const {
  if (max_char_repeat < 1) {
    throw InvalidArgument("max_char_repeat must be >= 1, got " +
                          std::to_string(max_char_repeat));
  }
}

TokenizerModel::TokenizerModel(std::vector<VocabPiece> pieces, SpecialIds specials,
                               NormalizerConfig normalizer_config)
    : pieces_(std::move(pieces)),
      specials_(specials),
      normalizer_config_(normalizer_config) {
  normalizer_config_.Validate();
  if (pieces_.size() > static_cast<size_t>(INT32_MAX)) {
    throw FormatError("vocabulary too large");
  }
  index_.reserve(pieces_.size());
  size_t unknown_count = 0;
  for (size_t i = 0; i < pieces_.size(); ++i) {
    const VocabPiece& p = pieces_[i];
    const std::string where = "piece " + std::to_string(i);
    if (p.surface.empty()) throw FormatError(where + ": empty surface");
    if (p.surface.find('\0') != std::string::npos) {
      throw FormatError(where + ": surface contains U+0000");
    }
    if (!IsValidUtf8(p.surface)) throw FormatError(where + ": surface is not UTF-8");
    if (p.score && !std::isfinite(*p.score)) {
      throw FormatError(where + ": non-finite score");
    }
    if (p.kind == PieceKind::kNormal && !p.score) {
      throw FormatError(where + ": normal piece without score");
    }
    if (p.kind == PieceKind::kUnscored && p.score) {
      throw FormatError(where + ": unscored piece carries a score");
    }
    if (p.kind == PieceKind::kUnknown) ++unknown_count;
    auto [it, inserted] = index_.emplace(p.surface, static_cast<TokenId>(i));
    if (!inserted) {
      throw FormatError(where + ": duplicate surface '" + p.surface +
                        "' (first at piece " + std::to_string(it->second) + ")");
    }
  }
  if (unknown_count != 1) {
    throw FormatError("model must contain exactly one unknown piece, found " +
                      std::to_string(unknown_count));
  }
  auto check = [this](const char* name, std::optional<TokenId> id) {
    if (id && !IsValidId(*id)) {
      throw FormatError(std::string("dangling special id ") + name + "=" +
                        std::to_string(*id));
    }
  };
  check("unk_id", specials_.unk_id);
  check("mask_id", specials_.mask_id);
  check("pad_id", specials_.pad_id);
  check("bos_id", specials_.bos_id);
  check("eos_id", specials_.eos_id);
  check("space_id", specials_.space_id);
  if (pieces_[static_cast<size_t>(specials_.unk_id)].kind != PieceKind::kUnknown) {
    throw FormatError("unk_id " + std::to_string(specials_.unk_id) +
                      " does not point at the unknown piece");
  }
}

TokenizerModel TokenizerModel::WithDefaultSpecials(std::vector<VocabPiece> pieces,
                                                   NormalizerConfig normalizer_config) {
  auto find = [&](std::string_view surface) -> std::optional<TokenId> {
    for (size_t i = 0; i < pieces.size(); ++i) {
      if (pieces[i].surface == surface) return static_cast<TokenId>(i);
    }
    return std::nullopt;
  };
  SpecialIds specials;
  const auto unk = FindUnknown(pieces);
  if (!unk) throw FormatError("model has no unknown piece");
  specials.unk_id = *unk;
  specials.mask_id = find(kDefaultMaskSurface);
  specials.pad_id = find(kDefaultPadSurface);
  specials.bos_id = find(kDefaultBosSurface);
  specials.eos_id = find(kDefaultEosSurface);
  specials.space_id = find(kDefaultSpaceSurface);
  return TokenizerModel(std::move(pieces), specials, normalizer_config);
}

std::optional<TokenId> TokenizerModel::Find(std::string_view surface) const {
  const auto it = index_.find(surface);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string SerializeCanonical(const TokenizerModel& model) {
  const SpecialIds& sp = model.specials();
  const NormalizerConfig& nc = model.normalizer_config();
  std::string out;
  out.reserve(model.size() * 24 + 256);
  out += "#format=" + std::string(kFormatName) + "\n";
  out += "#version=" + std::to_string(kFormatVersion) + "\n";
  out += "#unk_id=" + std::to_string(sp.unk_id) + "\n";
  out += "#mask_id=" + FormatOptionalId(sp.mask_id) + "\n";
  out += "#pad_id=" + FormatOptionalId(sp.pad_id) + "\n";
  out += "#bos_id=" + FormatOptionalId(sp.bos_id) + "\n";
  out += "#eos_id=" + FormatOptionalId(sp.eos_id) + "\n";
  out += "#space_id=" + FormatOptionalId(sp.space_id) + "\n";
  out += "#max_char_repeat=" + std::to_string(nc.max_char_repeat) + "\n";
  out += std::string("#preserve_space=") + (nc.preserve_space ? "true" : "false") + "\n";
  out += std::string("#lowercase=") + (nc.lowercase ? "true" : "false") + "\n";
  const auto pieces = model.pieces();
  for (size_t i = 0; i < pieces.size(); ++i) {
    const VocabPiece& p = pieces[i];
    out += std::to_string(i);
    out += '\t';
    out += Escape(p.surface);
    out += '\t';
    out += p.score ? FormatScore(*p.score) : std::string(kNoScore);
    out += '\t';
    out += PieceKindName(p.kind);
    out += '\n';
  }
  return out;
}

TokenizerModel ParseCanonical(std::string_view content, Warnings* warnings) {
  std::unordered_map<std::string, std::pair<std::string, size_t>> header;
  std::vector<VocabPiece> pieces;
  std::vector<size_t> piece_lines;
  std::unordered_map<std::string, size_t> surface_index;

  size_t line_no = 0;
  size_t pos = 0;
  bool records_started = false;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (records_started) FailAt(line_no, "header line after records");
      const size_t eq = line.find('=');
      if (eq == std::string_view::npos) FailAt(line_no, "header line without '='");
      std::string key(line.substr(1, eq - 1));
      if (header.count(key) != 0) FailAt(line_no, "repeated header key '" + key + "'");
      header.emplace(key, std::make_pair(std::string(line.substr(eq + 1)), line_no));
      continue;
    }
    records_started = true;
    const auto fields = SplitTabs(line);
    if (fields.size() != 4) {
      FailAt(line_no, "expected 4 tab-separated fields, got " +
                          std::to_string(fields.size()));
    }
    size_t id = 0;
    if (!ParseNumber(fields[0], &id) || id != pieces.size()) {
      FailAt(line_no, "id '" + std::string(fields[0]) + "' is not the next dense id " +
                          std::to_string(pieces.size()));
    }
    VocabPiece piece;
    auto surface = Unescape(fields[1]);
    if (!surface) FailAt(line_no, "bad escape sequence in surface");
    piece.surface = std::move(*surface);
    if (piece.surface.empty()) FailAt(line_no, "empty surface");
    if (!IsValidUtf8(piece.surface)) FailAt(line_no, "surface is not valid UTF-8");
    if (piece.surface.find('\0') != std::string::npos) {
      FailAt(line_no, "surface contains U+0000");
    }
    if (fields[2] != kNoScore) {
      double score = 0;
      if (!ParseNumber(fields[2], &score)) {
        FailAt(line_no, "unparseable score '" + std::string(fields[2]) + "'");
      }
      if (!std::isfinite(score)) FailAt(line_no, "non-finite score");
      piece.score = score;
    }
    const auto kind = ParsePieceKind(fields[3]);
    if (!kind) FailAt(line_no, "unknown piece kind '" + std::string(fields[3]) + "'");
    piece.kind = *kind;
    if (piece.kind == PieceKind::kNormal && !piece.score) {
      FailAt(line_no, "normal piece without score");
    }
    if (piece.kind == PieceKind::kUnscored && piece.score) {
      FailAt(line_no, "unscored piece carries a score");
    }
    if (piece.kind == PieceKind::kNormal && *piece.score > 0 && warnings) {
      warnings->push_back("line " + std::to_string(line_no) + ": positive score " +
                          FormatScore(*piece.score) + " on '" + piece.surface + "'");
    }
    auto [it, inserted] = surface_index.emplace(piece.surface, pieces.size());
    if (!inserted) {
      FailAt(line_no, "duplicate surface '" + piece.surface + "' (first on line " +
                          std::to_string(piece_lines[it->second]) + ")");
    }
    pieces.push_back(std::move(piece));
    piece_lines.push_back(line_no);
  }

  auto header_value = [&](const std::string& key) -> const std::pair<std::string, size_t>* {
    const auto it = header.find(key);
    return it == header.end() ? nullptr : &it->second;
  };
  if (const auto* fmt = header_value("format"); fmt && fmt->first != kFormatName) {
    FailAt(fmt->second, "unsupported format '" + fmt->first + "'");
  }
  if (const auto* ver = header_value("version")) {
    int v = 0;
    if (!ParseNumber(std::string_view(ver->first), &v) || v != kFormatVersion) {
      FailAt(ver->second, "unsupported version '" + ver->first + "'");
    }
  }

  NormalizerConfig nc;
  if (const auto* v = header_value("max_char_repeat")) {
    if (!ParseNumber(std::string_view(v->first), &nc.max_char_repeat) ||
        nc.max_char_repeat < 1) {
      FailAt(v->second, "max_char_repeat must be a positive integer");
    }
  }
  if (const auto* v = header_value("preserve_space")) {
    if (!ParseBool(v->first, &nc.preserve_space)) FailAt(v->second, "expected true/false");
  }
  if (const auto* v = header_value("lowercase")) {
    if (!ParseBool(v->first, &nc.lowercase)) FailAt(v->second, "expected true/false");
  }

  auto find_surface = [&](std::string_view surface) -> std::optional<TokenId> {
    const auto it = surface_index.find(std::string(surface));
    if (it == surface_index.end()) return std::nullopt;
    return static_cast<TokenId>(it->second);
  };
  auto special = [&](const std::string& key,
                     std::string_view default_surface) -> std::optional<TokenId> {
    const auto* v = header_value(key);
    if (v == nullptr) return find_surface(default_surface);
    if (v->first == "none") return std::nullopt;
    int64_t id = 0;
    if (!ParseNumber(std::string_view(v->first), &id)) {
      FailAt(v->second, "malformed " + key + " '" + v->first + "'");
    }
    if (id < 0 || static_cast<size_t>(id) >= pieces.size()) {
      FailAt(v->second, "dangling special id " + key + "=" + v->first);
    }
    return static_cast<TokenId>(id);
  };

  SpecialIds sp;
  if (const auto* v = header_value("unk_id")) {
    const auto id = special("unk_id", kDefaultUnkSurface);
    if (!id) FailAt(v->second, "unk_id cannot be none");
    if (pieces[static_cast<size_t>(*id)].kind != PieceKind::kUnknown) {
      FailAt(v->second, "unk_id does not point at an unknown piece");
    }
    sp.unk_id = *id;
  } else {
    const auto id = FindUnknown(pieces);
    if (!id) throw FormatError("model has no unknown piece");
    sp.unk_id = *id;
  }
  sp.mask_id = special("mask_id", kDefaultMaskSurface);
  sp.pad_id = special("pad_id", kDefaultPadSurface);
  sp.bos_id = special("bos_id", kDefaultBosSurface);
  sp.eos_id = special("eos_id", kDefaultEosSurface);
  sp.space_id = special("space_id", kDefaultSpaceSurface);

  size_t unknowns = 0;
  size_t second_unknown_line = 0;
  for (size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].kind == PieceKind::kUnknown && ++unknowns == 2) {
      second_unknown_line = piece_lines[i];
    }
  }
  if (unknowns > 1) FailAt(second_unknown_line, "second unknown piece");

  return TokenizerModel(std::move(pieces), sp, nc);
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  return content;
}

void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

TokenizerModel LoadCanonical(const std::filesystem::path& path, Warnings* warnings) {
  const std::string content = ReadFileBytes(path);
  try {
    return ParseCanonical(content, warnings);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void SaveCanonical(const TokenizerModel& model, const std::filesystem::path& path,
                   const SaveOptions& options) {
  if (!options.allow_positive_scores) {
    for (size_t i = 0; i < model.size(); ++i) {
      const VocabPiece& p = model.pieces()[i];
      if (p.kind == PieceKind::kNormal && *p.score > 0) {
        throw InvalidArgument("piece " + std::to_string(i) + " ('" + p.surface +
                              "') has positive score; pass allow_positive_scores");
      }
    }
  }
  WriteFileBytes(path, SerializeCanonical(model));
}

TokenizerModel LoadAnyModel(const std::filesystem::path& path, Warnings* warnings) {
  const std::string content = ReadFileBytes(path);
  try {
    // Canonical files open with a header or an id; a SentencePiece model
    // opens with the tag byte of its repeated pieces field (0x0A).
    if (!content.empty() && (content.front() == '#' || (content.front() >= '0' &&
                                                         content.front() <= '9'))) {
      return ParseCanonical(content, warnings);
    }
    return ParseSentencePiece(content);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string ModelChecksum(const TokenizerModel& model) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : SerializeCanonical(model)) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace vocab_graft
