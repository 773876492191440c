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

#include <random>

#include <gtest/gtest.h>

#include "json.hpp"
#include "test_util.h"
#include "vocab_graft/errors.h"

namespace vocab_graft {
namespace {

using testing::FixturePath;
using testing::MakeModel;
using testing::TempDir;
using testing::WriteText;

constexpr char kThreePiece[] =
    "#format=vocab-graft-model\n"
    "0\t<unk>\t\xE2\x88\x85\tunknown\n"
    "1\ta\t-1.0\tnormal\n"
    "2\tb\t-2.0\tnormal\n";

TEST(ModelStoreTest, LoadsMinimalModel) {
  TempDir dir;
  WriteText(dir / "m.txt", kThreePiece);
  const TokenizerModel model = LoadCanonical(dir / "m.txt");
  ASSERT_EQ(model.size(), 3u);
  EXPECT_EQ(model.specials().unk_id, 0);
  EXPECT_EQ(model.piece(1), (VocabPiece{"a", -1.0, PieceKind::kNormal}));
  EXPECT_FALSE(model.piece(0).score.has_value());
  EXPECT_EQ(model.Find("b"), 2);
  EXPECT_FALSE(model.Find("c").has_value());
  EXPECT_FALSE(model.specials().space_id.has_value());
  EXPECT_EQ(model.normalizer_config(), NormalizerConfig{});
}

TEST(ModelStoreTest, DuplicateSurfaceNamesBothLines) {
  try {
    ParseCanonical(std::string(kThreePiece) + "3\ta\t-3\tnormal\n");
    FAIL() << "expected duplicate-surface error";
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 5"), std::string::npos) << msg;
    EXPECT_NE(msg.find("duplicate surface 'a'"), std::string::npos) << msg;
    EXPECT_NE(msg.find("first on line 3"), std::string::npos) << msg;
  }
}

TEST(ModelStoreTest, RejectsInvariantViolations) {
  const std::string base = "0\t<unk>\t\xE2\x88\x85\tunknown\n";
  EXPECT_THROW(ParseCanonical("#mask_id=7\n" + base), FormatError);     // dangling special
  EXPECT_THROW(ParseCanonical(base + "1\ta\tnan\tnormal\n"), FormatError);
  EXPECT_THROW(ParseCanonical(base + "1\ta\tinf\tnormal\n"), FormatError);
  EXPECT_THROW(ParseCanonical(base + "1\ta\t\xE2\x88\x85\tnormal\n"), FormatError);
  EXPECT_THROW(ParseCanonical(base + "1\ta\t-1\tunscored\n"), FormatError);
  EXPECT_THROW(ParseCanonical(base + "2\ta\t-1\tnormal\n"), FormatError);  // id gap
  EXPECT_THROW(ParseCanonical(base + "1\ta\t-1\tweird\n"), FormatError);
  EXPECT_THROW(ParseCanonical(base + "1\tx\\q\t-1\tnormal\n"), FormatError);
  EXPECT_THROW(ParseCanonical(base + "1\t<u2>\t\xE2\x88\x85\tunknown\n"), FormatError);
  EXPECT_THROW(ParseCanonical("1\ta\t-1\tnormal\n"), FormatError);  // no unknown
  EXPECT_THROW(ParseCanonical("#unk_id=1\n" + base + "1\ta\t-1\tnormal\n"), FormatError);
  EXPECT_THROW(ParseCanonical("#max_char_repeat=0\n" + base), FormatError);
  try {
    ParseCanonical(base + "1\ta\t1e999\tnormal\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(ModelStoreTest, PositiveScoreLoadsWithWarningButSaveRefuses) {
  const std::string text = "0\t<unk>\t\xE2\x88\x85\tunknown\n1\ta\t1.0\tnormal\n";
  Warnings warnings;
  const TokenizerModel model = ParseCanonical(text, &warnings);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("positive score"), std::string::npos);

  TempDir dir;
  EXPECT_THROW(SaveCanonical(model, dir / "out.txt"), InvalidArgument);
  SaveCanonical(model, dir / "out.txt", {.allow_positive_scores = true});
  EXPECT_EQ(LoadCanonical(dir / "out.txt"), model);
}

TEST(ModelStoreTest, RoundTripPreservesEveryField) {
  std::vector<VocabPiece> pieces = {
      {"<s>", 0.0, PieceKind::kControl},
      {"<unk>", std::nullopt, PieceKind::kUnknown},
      {"tab\there", -0.5, PieceKind::kNormal},
      {"new\nline\\x\r", -1e-300, PieceKind::kNormal},
      {"\xE0\xB8\x81", -0.1, PieceKind::kNormal},
      {"zero", 0.0, PieceKind::kNormal},
      {"negzero", -0.0, PieceKind::kNormal},
      {"\xF0\x9F\x98\x80", std::nullopt, PieceKind::kUnscored},
      {"<mask>", std::nullopt, PieceKind::kControl},
  };
  SpecialIds sp;
  sp.unk_id = 1;
  sp.bos_id = 0;
  sp.mask_id = 8;
  const TokenizerModel model(pieces, sp, {.max_char_repeat = 5, .preserve_space = false,
                                          .lowercase = false});
  TempDir dir;
  SaveCanonical(model, dir / "m.txt");
  const TokenizerModel loaded = LoadCanonical(dir / "m.txt");
  EXPECT_EQ(loaded, model);
  EXPECT_TRUE(std::signbit(*loaded.piece(6).score));
  // An explicit "none" is not re-resolved from the default surface.
  EXPECT_FALSE(loaded.specials().eos_id.has_value());
}

TEST(ModelStoreTest, RoundTripOfLargeSyntheticVocabulary) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> score(-30.0, 0.0);
  std::vector<VocabPiece> pieces = {{"<unk>", std::nullopt, PieceKind::kUnknown}};
  for (int i = 0; i < 250000; ++i) {
    pieces.push_back({"p" + std::to_string(i) + "\xE0\xB8\x81", score(rng), PieceKind::kNormal});
  }
  const TokenizerModel model = TokenizerModel::WithDefaultSpecials(std::move(pieces));
  TempDir dir;
  SaveCanonical(model, dir / "big.txt");
  const TokenizerModel loaded = LoadCanonical(dir / "big.txt");
  EXPECT_EQ(ModelChecksum(loaded), ModelChecksum(model));
  EXPECT_EQ(loaded, model);
}

TEST(ModelStoreTest, SaveToUnwritablePathIsIoError) {
  const TokenizerModel model = MakeModel({{"a", -1.0}});
  TempDir dir;
  EXPECT_THROW(SaveCanonical(model, dir / "missing" / "m.txt"), IoError);
  EXPECT_THROW(LoadCanonical(dir / "absent.txt"), IoError);
}

TEST(ModelStoreTest, ConstructorEnforcesSingleUnknown) {
  std::vector<VocabPiece> two = {{"<unk>", std::nullopt, PieceKind::kUnknown},
                                 {"<unk2>", std::nullopt, PieceKind::kUnknown}};
  EXPECT_THROW(TokenizerModel(two, {}), FormatError);
  std::vector<VocabPiece> nul = {{"<unk>", std::nullopt, PieceKind::kUnknown},
                                 {std::string("a\0b", 3), -1.0, PieceKind::kNormal}};
  EXPECT_THROW(TokenizerModel(nul, {}), FormatError);
}

TEST(SentencePieceImportTest, TwoPieceFixtureFromProtobufRuntime) {
  const TokenizerModel model = ImportSentencePiece(FixturePath("spm_two_piece.model"));
  ASSERT_EQ(model.size(), 2u);
  EXPECT_EQ(model.piece(0), (VocabPiece{"<unk>", 0.0, PieceKind::kUnknown}));
  EXPECT_EQ(model.piece(1), (VocabPiece{"hi", -2.25, PieceKind::kNormal}));
  EXPECT_EQ(model.specials().unk_id, 0);
}

TEST(SentencePieceImportTest, TrainedModelKeepsOrderAndScores) {
  const TokenizerModel model = ImportSentencePiece(FixturePath("spm_small.model"));
  const auto expected = nlohmann::json::parse(
      testing::ReadText(FixturePath("spm_small_expected.json")));
  EXPECT_EQ(model.size(), expected["vocab_size"].get<size_t>());
  // Trainer layout: <unk>, <s>, </s> first.
  EXPECT_EQ(model.piece(0).kind, PieceKind::kUnknown);
  EXPECT_EQ(model.piece(1), (VocabPiece{"<s>", 0.0, PieceKind::kControl}));
  EXPECT_EQ(model.specials().bos_id, 1);
  EXPECT_EQ(model.specials().eos_id, 2);
  // Real unigram models carry only non-positive log-probabilities.
  for (const auto& p : model.pieces()) {
    ASSERT_TRUE(p.score.has_value());
    EXPECT_LE(*p.score, 0.0) << p.surface;
  }
}

TEST(SentencePieceImportTest, TruncatedFileIsMalformed) {
  const std::string bytes = testing::ReadText(FixturePath("spm_small.model"));
  for (size_t cut : {size_t{1}, size_t{7}, bytes.size() / 2, bytes.size() - 1}) {
    EXPECT_THROW(ParseSentencePiece(bytes.substr(0, cut)), FormatError) << cut;
  }
}

TEST(SentencePieceImportTest, WireErrors) {
  // piece record whose score (field 2) is a varint.
  const std::string bad_score = std::string("\x0A\x07\x0A\x01x\x10\x05\x18\x02", 9);
  EXPECT_THROW(ParseSentencePiece(bad_score), FormatError);
  // single NORMAL piece: no UNKNOWN.
  const std::string no_unk = std::string("\x0A\x03\x0A\x01x", 5);
  EXPECT_THROW(ParseSentencePiece(no_unk), FormatError);
  // group wire type at top level.
  EXPECT_THROW(ParseSentencePiece(std::string("\x13", 1)), FormatError);
}

TEST(SentencePieceImportTest, ImportPreservesRecordPositions) {
  // Hand-encoded: [NORMAL "b" -1], [UNKNOWN "<unk>"], [USER_DEFINED "<_>"],
  // [CONTROL "<mask>"] plus an unknown top-level varint field.
  auto record = [](const std::string& piece, float score, int type) {
    std::string body;
    body += '\x0A';
    body += static_cast<char>(piece.size());
    body += piece;
    body += '\x15';
    uint32_t bits;
    std::memcpy(&bits, &score, 4);
    for (int i = 0; i < 4; ++i) body += static_cast<char>((bits >> (8 * i)) & 0xFF);
    body += '\x18';
    body += static_cast<char>(type);
    return std::string("\x0A", 1) + static_cast<char>(body.size()) + body;
  };
  const std::string bytes = record("b", -1.0f, 1) + std::string("\x28\x96\x01", 3) +
                            record("<unk>", 0.0f, 2) + record("<_>", 0.0f, 4) +
                            record("<mask>", 0.0f, 3);
  const TokenizerModel model = ParseSentencePiece(bytes);
  ASSERT_EQ(model.size(), 4u);
  EXPECT_EQ(model.piece(0).surface, "b");
  EXPECT_EQ(model.specials().unk_id, 1);
  EXPECT_EQ(model.piece(2).kind, PieceKind::kControl);
  EXPECT_EQ(model.specials().space_id, 2);
  EXPECT_EQ(model.specials().mask_id, 3);
}

}  // namespace
}  // namespace vocab_graft
