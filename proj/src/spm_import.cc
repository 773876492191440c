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

// Minimal protobuf wire-format reader for SentencePiece ModelProto files.
//
//   message ModelProto {
//     message SentencePiece {
//       optional string piece = 1;
//       optional float score = 2;
//       optional Type type = 3 [default = NORMAL];
//     }
//     repeated SentencePiece pieces = 1;
//     ...  // trainer/normalizer specs, skipped
//   }

#include <bit>
#include <cstring>
#include <string>

#include "vocab_graft/errors.h"
#include "vocab_graft/model_store.h"

namespace vocab_graft {
namespace {

enum WireType : uint32_t {
  kVarint = 0,
  kFixed64 = 1,
  kLengthDelimited = 2,
  kStartGroup = 3,
  kEndGroup = 4,
  kFixed32 = 5,
};

// SentencePiece::Type enum values.
constexpr uint64_t kSpmNormal = 1;
constexpr uint64_t kSpmUnknown = 2;

class WireReader {
 public:
  WireReader(std::string_view data, size_t base) : data_(data), base_(base) {}

  bool done() const { return pos_ >= data_.size(); }
  size_t offset() const { return base_ + pos_; }

  uint64_t ReadVarint() {
    uint64_t value = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      if (pos_ >= data_.size()) Fail("truncated varint");
      const auto byte = static_cast<unsigned char>(data_[pos_++]);
      value |= uint64_t{byte & 0x7Fu} << shift;
      if ((byte & 0x80) == 0) return value;
    }
    Fail("varint longer than 10 bytes");
  }

  std::string_view ReadBytes(size_t n) {
    if (n > data_.size() - pos_) Fail("length-delimited field runs past end of input");
    const std::string_view out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  uint32_t ReadFixed32() {
    const std::string_view b = ReadBytes(4);
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
    return v;
  }

  void Skip(uint32_t wire_type) {
    switch (wire_type) {
      case kVarint: ReadVarint(); return;
      case kFixed64: ReadBytes(8); return;
      case kLengthDelimited: ReadBytes(CheckedLength()); return;
      case kFixed32: ReadBytes(4); return;
      default: Fail("unsupported wire type " + std::to_string(wire_type));
    }
  }

  size_t CheckedLength() {
    const uint64_t len = ReadVarint();
    if (len > data_.size() - pos_) Fail("length-delimited field runs past end of input");
    return static_cast<size_t>(len);
  }

  [[noreturn]] void Fail(const std::string& what) const {
    throw FormatError("malformed SentencePiece model at byte " +
                      std::to_string(offset()) + ": " + what);
  }

 private:
  std::string_view data_;
  size_t base_;
  size_t pos_ = 0;
};

VocabPiece ParsePieceRecord(std::string_view bytes, size_t base, size_t index) {
  WireReader reader(bytes, base);
  VocabPiece piece;
  double score = 0.0;
  uint64_t type = kSpmNormal;
  bool has_surface = false;
  while (!reader.done()) {
    const uint64_t tag = reader.ReadVarint();
    const auto field = static_cast<uint32_t>(tag >> 3);
    const auto wire_type = static_cast<uint32_t>(tag & 7);
    auto require = [&](uint32_t expected) {
      if (wire_type != expected) {
        reader.Fail("piece " + std::to_string(index) + " field " + std::to_string(field) +
                    " has unsupported wire type " + std::to_string(wire_type));
      }
    };
    switch (field) {
      case 1:
        require(kLengthDelimited);
        piece.surface = std::string(reader.ReadBytes(reader.CheckedLength()));
        has_surface = true;
        break;
      case 2:
        require(kFixed32);
        score = static_cast<double>(std::bit_cast<float>(reader.ReadFixed32()));
        break;
      case 3:
        require(kVarint);
        type = reader.ReadVarint();
        break;
      default:
        reader.Skip(wire_type);
    }
  }
  if (!has_surface) reader.Fail("piece " + std::to_string(index) + " has no surface");
  if (type == kSpmNormal) {
    piece.kind = PieceKind::kNormal;
  } else if (type == kSpmUnknown) {
    piece.kind = PieceKind::kUnknown;
  } else {
    piece.kind = PieceKind::kControl;
  }
  piece.score = score;
  return piece;
}

}  // namespace

TokenizerModel ParseSentencePiece(std::string_view bytes) {
  WireReader reader(bytes, 0);
  std::vector<VocabPiece> pieces;
  while (!reader.done()) {
    const uint64_t tag = reader.ReadVarint();
    const auto field = static_cast<uint32_t>(tag >> 3);
    const auto wire_type = static_cast<uint32_t>(tag & 7);
    if (field == 0) reader.Fail("field number 0");
    if (field == 1) {
      if (wire_type != kLengthDelimited) {
        reader.Fail("pieces field has unsupported wire type " + std::to_string(wire_type));
      }
      const size_t len = reader.CheckedLength();
      const size_t base = reader.offset();
      pieces.push_back(ParsePieceRecord(reader.ReadBytes(len), base, pieces.size()));
    } else {
      reader.Skip(wire_type);
    }
  }
  bool has_unknown = false;
  for (const auto& p : pieces) has_unknown |= p.kind == PieceKind::kUnknown;
  if (!has_unknown) throw FormatError("SentencePiece model has no UNKNOWN piece");
  return TokenizerModel::WithDefaultSpecials(std::move(pieces));
}

TokenizerModel ImportSentencePiece(const std::filesystem::path& path) {
  const std::string bytes = ReadFileBytes(path);
  try {
    return ParseSentencePiece(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace vocab_graft
