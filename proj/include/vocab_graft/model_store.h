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

// Tokenizer model types and their on-disk forms.
//
// The canonical format is line-oriented UTF-8 text:
//
//   #format=vocab-graft-model
//   #version=1
//   #unk_id=0
//   #mask_id=none
//   ...
//   #max_char_repeat=3
//   #preserve_space=true
//   #lowercase=true
//   0<TAB><unk><TAB>∅<TAB>unknown
//   1<TAB>a<TAB>-1<TAB>normal
//
// Surfaces escape TAB, LF, CR and backslash as \t, \n, \r and \\. A score of
// "∅" (U+2205) means "no score"; it is distinct from 0.
//
// SentencePiece binary models can be imported (never written).

#ifndef VOCAB_GRAFT_MODEL_STORE_H_
#define VOCAB_GRAFT_MODEL_STORE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vocab_graft {

using TokenId = int32_t;

enum class PieceKind : uint8_t {
  kNormal,
  kUnknown,
  kControl,
  // Pattern-matched pieces (emoji) that carry no unigram score.
  kUnscored,
};

std::string_view PieceKindName(PieceKind kind);
std::optional<PieceKind> ParsePieceKind(std::string_view name);

struct VocabPiece {
  std::string surface;
  std::optional<double> score;
  PieceKind kind = PieceKind::kNormal;

  bool operator==(const VocabPiece&) const = default;
};

struct NormalizerConfig {
  int max_char_repeat = 3;
  bool preserve_space = true;
  bool lowercase = true;

  void Validate() const;
  bool operator==(const NormalizerConfig&) const = default;
};

struct SpecialIds {
  TokenId unk_id = 0;
  std::optional<TokenId> mask_id;
  std::optional<TokenId> pad_id;
  std::optional<TokenId> bos_id;
  std::optional<TokenId> eos_id;
  std::optional<TokenId> space_id;

  bool operator==(const SpecialIds&) const = default;
};

// Default surfaces used to resolve special ids that a file does not name.
inline constexpr std::string_view kDefaultUnkSurface = "<unk>";
inline constexpr std::string_view kDefaultMaskSurface = "<mask>";
inline constexpr std::string_view kDefaultPadSurface = "<pad>";
inline constexpr std::string_view kDefaultBosSurface = "<s>";
inline constexpr std::string_view kDefaultEosSurface = "</s>";
inline constexpr std::string_view kDefaultSpaceSurface = "<_>";

// Immutable vocabulary. Ids are dense positions in `pieces()`.
//
// Construction validates every invariant and throws FormatError:
//   - surfaces non-empty, valid UTF-8, no U+0000, unique;
//   - Normal pieces have a finite score, Unscored pieces have none;
//   - exactly one Unknown piece, and unk_id points at it;
//   - every present special id is in range.
class TokenizerModel {
 public:
  TokenizerModel(std::vector<VocabPiece> pieces, SpecialIds specials,
                 NormalizerConfig normalizer_config = {});

  // Resolves unk_id to the Unknown piece and the remaining specials by their
  // default surfaces.
  static TokenizerModel WithDefaultSpecials(std::vector<VocabPiece> pieces,
                                            NormalizerConfig normalizer_config = {});

  size_t size() const { return pieces_.size(); }
  std::span<const VocabPiece> pieces() const { return pieces_; }
  const VocabPiece& piece(TokenId id) const { return pieces_.at(static_cast<size_t>(id)); }
  bool IsValidId(int64_t id) const {
    return id >= 0 && static_cast<uint64_t>(id) < pieces_.size();
  }
  std::optional<TokenId> Find(std::string_view surface) const;

  const SpecialIds& specials() const { return specials_; }
  const NormalizerConfig& normalizer_config() const { return normalizer_config_; }

  bool operator==(const TokenizerModel& other) const {
    return pieces_ == other.pieces_ && specials_ == other.specials_ &&
           normalizer_config_ == other.normalizer_config_;
  }

 private:
  struct StringHash {
    using is_transparent = void;
    size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<VocabPiece> pieces_;
  std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>> index_;
  SpecialIds specials_;
  NormalizerConfig normalizer_config_;
};

// Non-fatal findings while loading (positive scores).
using Warnings = std::vector<std::string>;

std::string SerializeCanonical(const TokenizerModel& model);
TokenizerModel ParseCanonical(std::string_view content, Warnings* warnings = nullptr);

TokenizerModel LoadCanonical(const std::filesystem::path& path,
                             Warnings* warnings = nullptr);

struct SaveOptions {
  bool allow_positive_scores = false;
};

// Throws InvalidArgument on positive scores unless allowed, IoError on write
// failure.
void SaveCanonical(const TokenizerModel& model, const std::filesystem::path& path,
                   const SaveOptions& options = {});

// Decodes the repeated piece records of a SentencePiece ModelProto.
// NORMAL maps to Normal, UNKNOWN to Unknown, everything else to Control.
TokenizerModel ParseSentencePiece(std::string_view bytes);
TokenizerModel ImportSentencePiece(const std::filesystem::path& path);

// Canonical text if the file starts with '#', SentencePiece binary otherwise.
TokenizerModel LoadAnyModel(const std::filesystem::path& path,
                            Warnings* warnings = nullptr);

// FNV-1a 64 over the canonical serialization, as 16 hex digits.
std::string ModelChecksum(const TokenizerModel& model);

std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);

}  // namespace vocab_graft

#endif  // VOCAB_GRAFT_MODEL_STORE_H_
