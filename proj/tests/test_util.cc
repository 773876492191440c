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

#include "test_util.h"

#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "vocab_graft/cli.h"
#include "vocab_graft/embedding_bridge.h"

namespace vocab_graft::testing {

std::filesystem::path FixturePath(const std::string& name) {
  return std::filesystem::path(VOCAB_GRAFT_FIXTURES) / name;
}

std::filesystem::path DataPath(const std::string& name) {
  return std::filesystem::path(VOCAB_GRAFT_DATA) / name;
}

TempDir::TempDir() {
  std::string pattern =
      (std::filesystem::temp_directory_path() / "vocab_graft_test_XXXXXX").string();
  if (mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::permissions(path_, std::filesystem::perms::owner_all,
                               std::filesystem::perm_options::add, ec);
  std::filesystem::remove_all(path_, ec);
}

void WriteText(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TokenizerModel MakeModel(const std::vector<std::pair<std::string, double>>& normal,
                         bool with_space, NormalizerConfig config) {
  std::vector<VocabPiece> pieces;
  pieces.push_back({"<unk>", std::nullopt, PieceKind::kUnknown});
  for (const auto& [surface, score] : normal) {
    pieces.push_back({surface, score, PieceKind::kNormal});
  }
  SpecialIds specials;
  specials.unk_id = 0;
  if (with_space) {
    specials.space_id = static_cast<TokenId>(pieces.size());
    pieces.push_back({"<_>", std::nullopt, PieceKind::kControl});
  }
  return TokenizerModel(std::move(pieces), specials, config);
}

BruteForceResult BruteForceBest(const std::u32string& text,
                                const std::map<std::u32string, double>& vocab) {
  BruteForceResult best;
  bool have = false;
  // Every composition of text.size() into part lengths; each part is either a
  // vocabulary piece or (length 1 only) an unknown.
  std::function<void(size_t, int, double)> walk = [&](size_t pos, int unk, double score) {
    if (pos == text.size()) {
      ++best.segmentations;
      if (!have || unk < best.unk || (unk == best.unk && score > best.score)) {
        best.unk = unk;
        best.score = score;
        have = true;
      }
      return;
    }
    for (size_t len = 1; pos + len <= text.size(); ++len) {
      const auto it = vocab.find(text.substr(pos, len));
      if (it != vocab.end()) walk(pos + len, unk, it->second + score);
      if (len == 1 && it == vocab.end()) walk(pos + 1, unk + 1, score);
    }
  };
  walk(0, 0, 0.0);
  return best;
}

TransferOracle OracleTransfer(const TokenizerModel& recipient, const TokenizerModel& donor,
                              const std::vector<std::pair<char32_t, char32_t>>& excluded,
                              const std::set<std::u32string>& emoji, bool inject_emoji) {
  TransferOracle oracle;
  std::set<std::string> vocabulary;
  for (const auto& p : recipient.pieces()) vocabulary.insert(p.surface);
  auto has_excluded_scalar = [&](const std::string& s) {
    // Decode by hand so the oracle does not share the library's decoder.
    for (size_t i = 0; i < s.size();) {
      const auto b = static_cast<unsigned char>(s[i]);
      char32_t c;
      size_t n;
      if (b < 0x80) { c = b; n = 1; }
      else if ((b >> 5) == 0x6) { c = b & 0x1F; n = 2; }
      else if ((b >> 4) == 0xE) { c = b & 0x0F; n = 3; }
      else { c = b & 0x07; n = 4; }
      for (size_t k = 1; k < n; ++k) c = (c << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
      i += n;
      for (const auto& [lo, hi] : excluded) {
        if (lo <= c && c <= hi) return true;
      }
    }
    return false;
  };
  for (const auto& p : donor.pieces()) {
    if (p.kind != PieceKind::kNormal) {
      ++oracle.control;
    } else if (vocabulary.count(p.surface)) {
      ++oracle.duplicate;
    } else if (has_excluded_scalar(p.surface)) {
      ++oracle.script;
    } else {
      oracle.copied.push_back(p.surface);
      vocabulary.insert(p.surface);
    }
  }
  if (inject_emoji) {
    for (const auto& seq : emoji) {
      std::string s;
      for (char32_t c : seq) {
        if (c < 0x80) {
          s += static_cast<char>(c);
        } else if (c < 0x800) {
          s += static_cast<char>(0xC0 | (c >> 6));
          s += static_cast<char>(0x80 | (c & 0x3F));
        } else if (c < 0x10000) {
          s += static_cast<char>(0xE0 | (c >> 12));
          s += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
          s += static_cast<char>(0x80 | (c & 0x3F));
        } else {
          s += static_cast<char>(0xF0 | (c >> 18));
          s += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
          s += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
          s += static_cast<char>(0x80 | (c & 0x3F));
        }
      }
      if (vocabulary.insert(s).second) oracle.emoji_added.push_back(s);
    }
  }
  return oracle;
}

std::pair<std::vector<size_t>, size_t> OraclePack(const std::vector<size_t>& lengths,
                                                  size_t limit) {
  std::vector<size_t> chunks;
  size_t discarded = 0;
  size_t current = 0;
  bool open = false;
  for (const size_t len : lengths) {
    if (len == 0) continue;
    if (len > limit) {
      ++discarded;
      continue;
    }
    if (open && current + len <= limit) {
      current += len;
    } else {
      if (open) chunks.push_back(current);
      current = len;
      open = true;
    }
  }
  if (open) chunks.push_back(current);
  return {chunks, discarded};
}

std::u32string RandomString(std::mt19937_64& rng, const std::u32string& alphabet,
                            size_t max_len) {
  std::uniform_int_distribution<size_t> len_dist(0, max_len);
  std::uniform_int_distribution<size_t> char_dist(0, alphabet.size() - 1);
  std::u32string s(len_dist(rng), U'\0');
  for (auto& c : s) c = alphabet[char_dist(rng)];
  return s;
}

CliRun RunCliCapture(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun run;
  run.code = RunCli(args, out, err);
  run.out = out.str();
  run.err = err.str();
  return run;
}

std::vector<std::vector<std::string>> WriteCliScenario(const std::filesystem::path& dir) {
  const auto p = [&](const std::string& name) { return (dir / name).string(); };
  WriteText(dir / "recipient.txt",
            "0\t<unk>\t\xE2\x88\x85\tunknown\n"
            "1\t<mask>\t\xE2\x88\x85\tcontrol\n"
            "2\t<_>\t\xE2\x88\x85\tcontrol\n"
            "3\ta\t-1\tnormal\n"
            "4\tn\t-1.5\tnormal\n"
            "5\t\xE0\xB8\x81\t-2\tnormal\n"
            "6\t\xE0\xB8\x81\xE0\xB8\xB2\t-2.5\tnormal\n");
  WriteText(dir / "emoji.txt",
            "# Version: 15.1\n"
            "1F600 ; fully-qualified # grinning\n"
            "1F44D 1F3FD ; fully-qualified # thumbs up\n");
  std::string corpus;
  for (int i = 0; i < 40; ++i) {
    corpus += "token transfer masked layer \xF0\x9F\x98\x80 \xE0\xB8\x81\xE0\xB8\xB2 " +
              std::to_string(i) + "\n";
    corpus += "aaaa banana \xF0\x9F\x91\x8D\xF0\x9F\x8F\xBD\n";
  }
  WriteText(dir / "corpus.txt", corpus);
  WriteText(dir / "corpus.jsonl", "{\"text\":\"banana \xF0\x9F\x98\x80\"}\n{\"text\":\"an\"}\n");
  Matrix old_table(5, 4);
  for (size_t i = 0; i < old_table.data().size(); ++i) {
    old_table.data()[i] = static_cast<float>(i % 7) * 0.25f - 0.5f;
  }
  WriteMatrix(old_table, dir / "old.bin");
  return {
      {"import-spm", "--input", FixturePath("spm_small.model").string(), "--out", p("donor.txt")},
      {"transfer", "--recipient", p("recipient.txt"), "--donor", p("donor.txt"), "--emoji",
       p("emoji.txt"), "--out", p("grafted.txt"), "--report", p("report.json")},
      {"vocab-report", "--model", p("grafted.txt"), "--expected-size", "100"},
      {"tokenize", "--model", p("grafted.txt"), "--input", p("corpus.txt"), "--out",
       p("tokens.jsonl"), "--emoji", p("emoji.txt")},
      {"tokenize", "--model", p("grafted.txt"), "--text", "banana \xF0\x9F\x98\x80"},
      {"decode", "--model", p("grafted.txt"), "--ids", "3,2,4"},
      {"oov", "--model-a", p("recipient.txt"), "--model-b", p("grafted.txt"), "--corpus",
       "plain=" + p("corpus.txt"), "--corpus", "json=" + p("corpus.jsonl"), "--out",
       p("oov.json")},
      {"diff", "--model-a", p("recipient.txt"), "--model-b", p("grafted.txt"), "--input",
       p("corpus.txt"), "--out", p("diff.jsonl")},
      {"--seed", "5", "chunk", "--model", p("grafted.txt"), "--input", p("corpus.txt"),
       "--out-prefix", p("data"), "--limit", "30", "--split", "0.8,0.1,0.1"},
      {"chunk", "--model", p("grafted.txt"), "--input", p("corpus.txt"), "--out-prefix",
       p("all"), "--limit", "30"},
      {"--seed", "9", "mask-audit", "--model", p("grafted.txt"), "--chunks", p("all.chunks"),
       "--epochs", "3"},
      {"schedule-dump", "--until", "15000", "--every", "500", "--reset", "8000", "--out",
       p("schedule.csv")},
      {"--seed", "3", "init-embeddings", "--old", p("old.bin"), "--rows", "6", "--out",
       p("init.bin")},
      {"merge-embeddings", "--old", p("old.bin"), "--new", p("init.bin"), "--out",
       p("merged.bin")},
      {"split-embeddings", "--in", p("merged.bin"), "--boundary", "5", "--out-old",
       p("old2.bin"), "--out-new", p("new2.bin")},
  };
}

std::map<std::string, std::string> RunCliScenario(
    const std::filesystem::path& dir, const std::vector<std::vector<std::string>>& runs,
    std::string* failure) {
  std::map<std::string, std::string> outputs;
  for (size_t i = 0; i < runs.size(); ++i) {
    const CliRun run = RunCliCapture(runs[i]);
    if (run.code != 0 && failure->empty()) {
      *failure = "invocation " + std::to_string(i) + " (" + runs[i][0] + ") exited " +
                 std::to_string(run.code) + ": " + run.err;
    }
    outputs["stdout#" + std::to_string(i)] = run.out;
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    outputs[entry.path().filename().string()] = ReadText(entry.path());
  }
  return outputs;
}

}  // namespace vocab_graft::testing
