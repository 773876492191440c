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

#include "vocab_graft/cli.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vocab_graft/corpus_pipeline.h"
#include "vocab_graft/embedding_bridge.h"
#include "vocab_graft/emoji_set.h"
#include "vocab_graft/errors.h"
#include "vocab_graft/mlm_masking.h"
#include "vocab_graft/model_store.h"
#include "vocab_graft/schedules.h"
#include "vocab_graft/unigram_tokenizer.h"
#include "vocab_graft/vocab_transfer.h"

#ifndef VOCAB_GRAFT_DEFAULT_EMOJI_DATA
#define VOCAB_GRAFT_DEFAULT_EMOJI_DATA "data/emoji-test-15.1.txt"
#endif

namespace vocab_graft {
namespace {

using Json = nlohmann::ordered_json;

// Flag combinations CLI11 cannot check on its own.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  uint64_t seed = 0;
  int threads = 1;
  bool quiet = false;
};

struct Context {
  GlobalOptions global;
  std::ostream* out;
  std::ostream* err;

  void Result(const Json& j) const { *out << j.dump() << '\n'; }
  void Warn(const std::string& message) const {
    if (!global.quiet) *err << Json{{"warning", message}}.dump() << '\n';
  }
};

struct NormalizerFlags {
  std::optional<int> max_char_repeat;
  bool no_lowercase = false;
  bool no_preserve_space = false;

  void Register(CLI::App* app) {
    app->add_option("--max-char-repeat", max_char_repeat,
                    "Collapse runs longer than this (default: model setting)");
    app->add_flag("--no-lowercase", no_lowercase, "Disable lowercasing");
    app->add_flag("--no-preserve-space", no_preserve_space,
                  "Segment spaces as text instead of the space token");
  }

  NormalizerConfig Apply(NormalizerConfig base) const {
    if (max_char_repeat) base.max_char_repeat = *max_char_repeat;
    if (no_lowercase) base.lowercase = false;
    if (no_preserve_space) base.preserve_space = false;
    base.Validate();
    return base;
  }
};

struct EmojiFlags {
  std::string path;
  std::vector<std::string> types;

  void Register(CLI::App* app, const std::string& help) {
    app->add_option("--emoji", path, help);
    app->add_option("--emoji-type", types,
                    "Keep only emoji data lines of this type/status (repeatable)");
  }

  EmojiSet LoadOrEmpty() const {
    if (path.empty()) return {};
    return LoadEmojiSet(path, {types});
  }
};

std::string DefaultEmojiPath() {
  if (const char* env = std::getenv("VOCAB_GRAFT_EMOJI_DATA"); env && *env) return env;
  return VOCAB_GRAFT_DEFAULT_EMOJI_DATA;
}

TokenizerModel LoadModel(const Context& ctx, const std::string& path) {
  Warnings warnings;
  TokenizerModel model = LoadAnyModel(path, &warnings);
  for (const auto& w : warnings) ctx.Warn(path + ": " + w);
  return model;
}

std::unique_ptr<std::istream> OpenInput(const std::string& path) {
  auto in = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::unique_ptr<std::ofstream> OpenOutput(const std::string& path) {
  auto out = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
  if (!*out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void WriteJsonFile(const std::string& path, const Json& j) {
  WriteFileBytes(path, j.dump(2) + "\n");
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Json SpecialsJson(const SpecialIds& sp) {
  auto opt = [](const std::optional<TokenId>& id) -> Json {
    return id ? Json(*id) : Json(nullptr);
  };
  return Json{{"unk_id", sp.unk_id},   {"mask_id", opt(sp.mask_id)},
              {"pad_id", opt(sp.pad_id)}, {"bos_id", opt(sp.bos_id)},
              {"eos_id", opt(sp.eos_id)}, {"space_id", opt(sp.space_id)}};
}

Json EncodingJson(size_t record, const Encoding& enc) {
  return Json{{"record", record},
              {"ids", enc.ids},
              {"tokens", enc.surfaces},
              {"unk_count", enc.unk_count}};
}

std::vector<double> ParseFractions(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw UsageError("bad split fraction '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<TokenId> ParseIdList(const std::string& text) {
  std::vector<TokenId> ids;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    int64_t v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || v < INT32_MIN ||
        v > INT32_MAX) {
      throw UsageError("bad token id '" + item + "'");
    }
    ids.push_back(static_cast<TokenId>(v));
  }
  return ids;
}

using Command = std::function<void(const Context&)>;

// ---- subcommands ---------------------------------------------------------

Command AddImportSpm(CLI::App& app) {
  auto* sub = app.add_subcommand("import-spm", "Convert a SentencePiece .model file");
  struct Opts {
    std::string input, out;
    bool allow_positive = false;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--input", o->input, "SentencePiece model file")->required();
  sub->add_option("--out", o->out, "Canonical model output")->required();
  sub->add_flag("--allow-positive-scores", o->allow_positive, "Permit positive scores");
  return [o](const Context& ctx) {
    const TokenizerModel model = ImportSentencePiece(o->input);
    SaveCanonical(model, o->out, {o->allow_positive});
    ctx.Result({{"pieces", model.size()},
                {"specials", SpecialsJson(model.specials())},
                {"checksum", ModelChecksum(model)},
                {"out", o->out}});
  };
}

Command AddTransfer(CLI::App& app) {
  auto* sub = app.add_subcommand("transfer", "Graft donor vocabulary onto a recipient model");
  struct Opts {
    std::string recipient, donor, out, report;
    EmojiFlags emoji;
    std::vector<std::string> exclude_blocks;
    bool no_emoji = false;
    bool no_copy_scores = false;
    bool allow_positive = false;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--recipient", o->recipient, "Recipient model (canonical or .model)")
      ->required();
  sub->add_option("--donor", o->donor, "Donor model (canonical or .model)")->required();
  o->emoji.Register(sub,
                    "Emoji data file (default: $VOCAB_GRAFT_EMOJI_DATA or the bundled "
                    "Unicode 15.1 emoji-test.txt)");
  sub->add_option("--exclude-block", o->exclude_blocks,
                  "Scalar range whose pieces are not transferred, e.g. 0E00..0E7F "
                  "(repeatable; default 0E00..0E7F)");
  sub->add_flag("--no-emoji", o->no_emoji, "Do not inject emoji pieces");
  sub->add_flag("--no-copy-scores", o->no_copy_scores,
                "Give copied pieces the lowest recipient score");
  sub->add_option("--out", o->out, "Output canonical model")->required();
  sub->add_option("--report", o->report, "Write the transfer report JSON here");
  sub->add_flag("--allow-positive-scores", o->allow_positive, "Permit positive scores");
  return [o](const Context& ctx) {
    TransferPolicy policy;
    if (!o->exclude_blocks.empty()) {
      policy.excluded_blocks.clear();
      for (const auto& b : o->exclude_blocks) {
        try {
          policy.excluded_blocks.push_back(ParseScalarRange(b));
        } catch (const InvalidArgument& e) {
          throw UsageError(e.what());
        }
      }
    }
    policy.inject_emoji = !o->no_emoji;
    policy.copy_scores = !o->no_copy_scores;
    try {
      policy.Validate();
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
    EmojiSet emoji;
    if (policy.inject_emoji) {
      const std::string path = o->emoji.path.empty() ? DefaultEmojiPath() : o->emoji.path;
      emoji = LoadEmojiSet(path, {o->emoji.types});
    }
    const TokenizerModel recipient = LoadModel(ctx, o->recipient);
    const TokenizerModel donor = LoadModel(ctx, o->donor);
    TransferResult result = Transfer(recipient, donor, policy, emoji);
    SaveCanonical(result.model, o->out, {o->allow_positive});
    for (const auto& w : result.report.warnings) ctx.Warn(w);
    Json j = result.report.ToJson();
    j["excluded_blocks"] = Json::array();
    for (const auto& b : policy.excluded_blocks) j["excluded_blocks"].push_back(FormatScalarRange(b));
    j["checksum"] = ModelChecksum(result.model);
    if (!o->report.empty()) WriteJsonFile(o->report, j);
    ctx.Result(j);
  };
}

Command AddTokenize(CLI::App& app) {
  auto* sub = app.add_subcommand("tokenize", "Encode text or a corpus");
  struct Opts {
    std::string model, input, text, out;
    EmojiFlags emoji;
    NormalizerFlags norm;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--model", o->model, "Model file")->required();
  auto* input = sub->add_option("--input", o->input, "Corpus: text lines or JSON lines");
  auto* text = sub->add_option("--text", o->text, "Encode this string");
  input->excludes(text);
  sub->add_option("--out", o->out, "Write JSON lines here instead of stdout");
  o->emoji.Register(sub, "Extra emoji sequences to pattern-match");
  o->norm.Register(sub);
  return [o](const Context& ctx) {
    if (o->input.empty() && o->text.empty()) throw UsageError("need --input or --text");
    const TokenizerModel model = LoadModel(ctx, o->model);
    const EmojiSet emoji = o->emoji.LoadOrEmpty();
    const UnigramTokenizer tokenizer(model, emoji);
    const NormalizerConfig config = o->norm.Apply(model.normalizer_config());
    if (!o->text.empty()) {
      ctx.Result(EncodingJson(0, tokenizer.Encode(Normalize(o->text, config))));
      return;
    }
    std::unique_ptr<std::ofstream> file;
    std::ostream* sink = ctx.out;
    if (!o->out.empty()) {
      file = OpenOutput(o->out);
      sink = file.get();
    }
    auto in = OpenInput(o->input);
    RecordReader reader(*in);
    std::vector<std::string> batch;
    std::vector<Encoding> encoded;
    size_t next = 0;
    size_t tokens = 0;
    size_t unks = 0;
    while (reader.NextBatch(&batch, 4096) > 0) {
      encoded.assign(batch.size(), {});
      std::vector<std::string> errors(batch.size());
      ParallelFor(batch.size(), ctx.global.threads, [&](size_t i) {
        try {
          encoded[i] = tokenizer.Encode(Normalize(batch[i], config));
        } catch (const Error& e) {
          errors[i] = e.what();
        }
      });
      for (size_t i = 0; i < batch.size(); ++i) {
        if (!errors[i].empty()) {
          throw FormatError("record " + std::to_string(next + i) + ": " + errors[i]);
        }
        *sink << EncodingJson(next + i, encoded[i]).dump() << '\n';
        tokens += encoded[i].ids.size();
        unks += encoded[i].unk_count;
      }
      next += batch.size();
    }
    if (file) {
      file->flush();
      if (!*file) throw IoError("write failure on '" + o->out + "'");
      ctx.Result({{"records", next}, {"tokens", tokens}, {"unk_count", unks}, {"out", o->out}});
    }
  };
}

Command AddDecode(CLI::App& app) {
  auto* sub = app.add_subcommand("decode", "Turn token ids back into text");
  struct Opts {
    std::string model, ids;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--model", o->model, "Model file")->required();
  sub->add_option("--ids", o->ids, "Comma-separated token ids")->required();
  return [o](const Context& ctx) {
    const std::vector<TokenId> ids = ParseIdList(o->ids);
    const TokenizerModel model = LoadModel(ctx, o->model);
    const UnigramTokenizer tokenizer(model, EmojiSet{});
    ctx.Result({{"text", tokenizer.Decode(ids)}});
  };
}

Command AddOov(CLI::App& app) {
  auto* sub = app.add_subcommand("oov", "Compare <unk> rates of two models");
  struct Opts {
    std::string model_a, model_b, out;
    std::vector<std::string> corpora;
    EmojiFlags emoji;
    NormalizerFlags norm;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--model-a", o->model_a, "Baseline model")->required();
  sub->add_option("--model-b", o->model_b, "Expanded model")->required();
  sub->add_option("--corpus", o->corpora, "NAME=PATH or PATH (repeatable)")->required();
  sub->add_option("--out", o->out, "Also write the report JSON here");
  o->emoji.Register(sub, "Extra emoji sequences to pattern-match");
  o->norm.Register(sub);
  return [o](const Context& ctx) {
    const TokenizerModel a = LoadModel(ctx, o->model_a);
    const TokenizerModel b = LoadModel(ctx, o->model_b);
    const EmojiSet emoji = o->emoji.LoadOrEmpty();
    const UnigramTokenizer ta(a, emoji);
    const UnigramTokenizer tb(b, emoji);
    std::vector<std::pair<std::string, CorpusOpener>> corpora;
    for (const auto& spec : o->corpora) {
      const size_t eq = spec.find('=');
      std::string name = eq == std::string::npos
                             ? std::filesystem::path(spec).stem().string()
                             : spec.substr(0, eq);
      std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
      corpora.emplace_back(name, [path] { return OpenInput(path); });
    }
    const auto [ra, rb] = OovReports(corpora, ta, tb, o->norm.Apply(a.normalizer_config()),
                                     ctx.global.threads);
    const Json j{{"model_a", ra.ToJson()}, {"model_b", rb.ToJson()}};
    if (!o->out.empty()) WriteJsonFile(o->out, j);
    ctx.Result(j);
  };
}

Command AddDiff(CLI::App& app) {
  auto* sub = app.add_subcommand("diff", "List records whose segmentation differs");
  struct Opts {
    std::string model_a, model_b, input, out;
    EmojiFlags emoji;
    NormalizerFlags norm;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--model-a", o->model_a, "First model")->required();
  sub->add_option("--model-b", o->model_b, "Second model")->required();
  sub->add_option("--input", o->input, "Corpus: text lines or JSON lines")->required();
  sub->add_option("--out", o->out, "Write differences as JSON lines here");
  o->emoji.Register(sub, "Extra emoji sequences to pattern-match");
  o->norm.Register(sub);
  return [o](const Context& ctx) {
    const TokenizerModel a = LoadModel(ctx, o->model_a);
    const TokenizerModel b = LoadModel(ctx, o->model_b);
    const EmojiSet emoji = o->emoji.LoadOrEmpty();
    const UnigramTokenizer ta(a, emoji);
    const UnigramTokenizer tb(b, emoji);
    std::unique_ptr<std::ofstream> file;
    std::ostream* sink = ctx.out;
    if (!o->out.empty()) {
      file = OpenOutput(o->out);
      sink = file.get();
    }
    auto in = OpenInput(o->input);
    RecordReader reader(*in);
    size_t differing = 0;
    const size_t records = SegmentationDiff(
        reader, ta, tb, o->norm.Apply(a.normalizer_config()),
        [&](const SegmentationDifference& d) {
          ++differing;
          *sink << Json{{"record", d.record_index},
                        {"tokens_a", d.tokens_a},
                        {"tokens_b", d.tokens_b}}
                       .dump()
                << '\n';
        },
        ctx.global.threads);
    if (file) {
      file->flush();
      if (!*file) throw IoError("write failure on '" + o->out + "'");
    }
    ctx.Result({{"summary", {{"records", records}, {"differing", differing}}}});
  };
}

Command AddChunk(CLI::App& app) {
  auto* sub = app.add_subcommand("chunk", "Encode a corpus and pack it into bounded chunks");
  struct Opts {
    std::string model, input, out_prefix, split;
    size_t limit = kDefaultChunkLimit;
    bool no_pack = false;
    EmojiFlags emoji;
    NormalizerFlags norm;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--model", o->model, "Model file")->required();
  sub->add_option("--input", o->input, "Corpus: text lines or JSON lines")->required();
  sub->add_option("--out-prefix", o->out_prefix,
                  "Writes PREFIX.chunks and PREFIX.manifest.json")
      ->required();
  sub->add_option("--limit", o->limit, "Maximum tokens per chunk")
      ->default_val(kDefaultChunkLimit)
      ->check(CLI::PositiveNumber);
  sub->add_flag("--no-pack", o->no_pack, "One record per chunk");
  sub->add_option("--split", o->split,
                  "Comma-separated fractions; writes PREFIX.<part>.chunks per part");
  o->emoji.Register(sub, "Extra emoji sequences to pattern-match");
  o->norm.Register(sub);
  return [o](const Context& ctx) {
    std::vector<double> fractions;
    if (!o->split.empty()) {
      fractions = ParseFractions(o->split);
      try {
        SplitIndices(0, fractions, 0);
      } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
      }
    }
    const TokenizerModel model = LoadModel(ctx, o->model);
    const EmojiSet emoji = o->emoji.LoadOrEmpty();
    const UnigramTokenizer tokenizer(model, emoji);
    auto in = OpenInput(o->input);
    RecordReader reader(*in);
    const ChunkedDataset dataset =
        Chunk(reader, tokenizer, o->norm.Apply(model.normalizer_config()),
              {o->limit, !o->no_pack, ctx.global.threads});
    Json manifest = ChunkManifest(dataset, ModelChecksum(model), !o->no_pack);
    if (fractions.empty()) {
      WriteChunks(dataset.chunks, o->out_prefix + ".chunks");
    } else {
      static const char* kThreeParts[] = {"train", "validation", "test"};
      const auto groups = SplitIndices(dataset.chunks.size(), fractions, ctx.global.seed);
      Json parts = Json::array();
      for (size_t g = 0; g < groups.size(); ++g) {
        const std::string name =
            groups.size() == 3 ? kThreeParts[g] : "part" + std::to_string(g);
        std::vector<std::vector<TokenId>> selected;
        for (const size_t idx : groups[g]) selected.push_back(dataset.chunks[idx]);
        const std::string path = o->out_prefix + "." + name + ".chunks";
        WriteChunks(selected, path);
        parts.push_back({{"name", name}, {"chunks", selected.size()}, {"path", path}});
      }
      manifest["split_seed"] = ctx.global.seed;
      manifest["split"] = parts;
    }
    WriteJsonFile(o->out_prefix + ".manifest.json", manifest);
    ctx.Result(manifest);
  };
}

Command AddMaskAudit(CLI::App& app) {
  auto* sub = app.add_subcommand("mask-audit", "Apply dynamic masking and report its statistics");
  struct Opts {
    std::string model, chunks;
    uint64_t epochs = 1;
    double ratio = 0.15, p_mask = 0.8, p_random = 0.1, p_keep = 0.1;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--model", o->model, "Model file (mask id, vocabulary)")->required();
  sub->add_option("--chunks", o->chunks, "Chunk file from `chunk`")->required();
  sub->add_option("--epochs", o->epochs, "Epochs to simulate")->default_val(1);
  sub->add_option("--mask-ratio", o->ratio, "Fraction of tokens selected")->default_val(0.15);
  sub->add_option("--p-mask", o->p_mask, "Selected -> <mask>")->default_val(0.8);
  sub->add_option("--p-random", o->p_random, "Selected -> random token")->default_val(0.1);
  sub->add_option("--p-keep", o->p_keep, "Selected -> unchanged")->default_val(0.1);
  return [o](const Context& ctx) {
    const TokenizerModel model = LoadModel(ctx, o->model);
    MaskingConfig config = MaskingConfig::ForModel(model, ctx.global.seed);
    config.mask_ratio = o->ratio;
    config.p_mask = o->p_mask;
    config.p_random = o->p_random;
    config.p_keep = o->p_keep;
    try {
      config.Validate();
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
    const auto chunks = ReadChunks(o->chunks);
    if (chunks.empty()) throw InvalidArgument("chunk file holds no sequences");
    MaskingStats stats;
    for (uint64_t epoch = 0; epoch < o->epochs; ++epoch) {
      std::vector<MaskedBatch> batches(chunks.size());
      std::vector<std::string> errors(chunks.size());
      ParallelFor(chunks.size(), ctx.global.threads, [&](size_t i) {
        try {
          batches[i] = MaskSequence(chunks[i], config, epoch, i);
        } catch (const Error& e) {
          errors[i] = e.what();
        }
      });
      for (size_t i = 0; i < chunks.size(); ++i) {
        if (!errors[i].empty()) throw InvalidArgument("chunk " + std::to_string(i) + ": " + errors[i]);
        stats.Add(batches[i]);
      }
    }
    Json j = stats.ToJson();
    j["epochs"] = o->epochs;
    j["seed"] = ctx.global.seed;
    j["chi_square"] = stats.ChiSquare(config.p_mask, config.p_random, config.p_keep);
    ctx.Result(j);
  };
}

Command AddScheduleDump(CLI::App& app) {
  auto* sub = app.add_subcommand("schedule-dump", "Print per-layer learning rates and freezing");
  struct Opts {
    int64_t until = 0;
    int64_t every = 1000;
    std::string format = "csv";
    std::string out;
    ScheduleConfig config;
    bool no_discriminative = false;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--until", o->until, "Last step (inclusive)")->required()->check(CLI::NonNegativeNumber);
  sub->add_option("--every", o->every, "Step stride")->default_val(1000)->check(CLI::PositiveNumber);
  sub->add_option("--format", o->format, "csv or json")
      ->default_val("csv")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", o->out, "Write rows here instead of stdout");
  sub->add_option("--peak-lr", o->config.peak_lr, "Peak learning rate")->default_val(3e-4);
  sub->add_option("--decay-factor", o->config.decay_factor, "Per-layer divisor")->default_val(2.6);
  sub->add_option("--warmup-steps", o->config.warmup_steps, "Linear warmup length")
      ->default_val(24000);
  sub->add_option("--max-steps", o->config.max_steps, "Scheduler max steps")->default_val(500000);
  sub->add_option("--unfreeze-interval", o->config.unfreeze_interval,
                  "Steps between unfreeze events")
      ->default_val(1000);
  sub->add_option("--reset", o->config.resets, "Restart the ramp at this step (repeatable)");
  sub->add_option("--steps-per-update", o->config.scheduler_steps_per_update,
                  "Scheduler steps per optimizer update")
      ->default_val(1);
  sub->add_flag("--no-discriminative", o->no_discriminative,
                "Give every layer the base learning rate");
  return [o](const Context& ctx) {
    ScheduleConfig config = o->config;
    config.discriminative_enabled = !o->no_discriminative;
    try {
      config.Validate();
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
    const LayerStack stack = LayerStack::Default();
    std::unique_ptr<std::ofstream> file;
    std::ostream* sink = ctx.out;
    if (!o->out.empty()) {
      file = OpenOutput(o->out);
      sink = file.get();
    }
    const bool csv = o->format == "csv";
    if (csv) *sink << "step,layer,lr,frozen\n";
    size_t rows = 0;
    for (int64_t step = 0; step <= o->until; step += o->every) {
      const auto mask = FrozenMask(config, stack, step);
      for (const auto& state : mask) {
        const double lr = LayerLr(config, stack, state.name, step);
        if (csv) {
          *sink << step << ',' << state.name << ',' << FormatDouble(lr) << ','
                << (state.frozen ? "true" : "false") << '\n';
        } else {
          *sink << Json{{"step", step}, {"layer", state.name}, {"lr", lr}, {"frozen", state.frozen}}
                       .dump()
                << '\n';
        }
        ++rows;
      }
    }
    if (file) {
      file->flush();
      if (!*file) throw IoError("write failure on '" + o->out + "'");
      ctx.Result({{"rows", rows}, {"out", o->out}});
    }
  };
}

Command AddSplitEmbeddings(CLI::App& app) {
  auto* sub = app.add_subcommand("split-embeddings", "Split a matrix at the boundary id");
  struct Opts {
    std::string in, report, out_old, out_new;
    std::optional<size_t> boundary;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--in", o->in, "Single embedding matrix")->required();
  auto* boundary = sub->add_option("--boundary", o->boundary, "First id of the added vocabulary");
  auto* report = sub->add_option("--report", o->report, "Take boundary_id from a transfer report");
  boundary->excludes(report);
  sub->add_option("--out-old", o->out_old, "Existing-vocabulary table")->required();
  sub->add_option("--out-new", o->out_new, "Added-vocabulary table")->required();
  return [o](const Context& ctx) {
    size_t boundary_id = 0;
    if (o->boundary) {
      boundary_id = *o->boundary;
    } else if (!o->report.empty()) {
      const auto j = nlohmann::json::parse(ReadFileBytes(o->report), nullptr, false);
      if (j.is_discarded() || !j.contains("boundary_id") || !j["boundary_id"].is_number_unsigned()) {
        throw FormatError(o->report + ": no unsigned boundary_id field");
      }
      boundary_id = j["boundary_id"].get<size_t>();
    } else {
      throw UsageError("need --boundary or --report");
    }
    const SplitEmbeddings split = Split(ReadMatrix(o->in), boundary_id);
    WriteMatrix(split.old_table, o->out_old);
    WriteMatrix(split.new_table, o->out_new);
    ctx.Result({{"boundary_id", boundary_id},
                {"old_rows", split.old_table.rows()},
                {"new_rows", split.new_table.rows()},
                {"width", split.width()}});
  };
}

Command AddMergeEmbeddings(CLI::App& app) {
  auto* sub = app.add_subcommand("merge-embeddings", "Concatenate the two tables back");
  struct Opts {
    std::string old_table, new_table, out;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--old", o->old_table, "Existing-vocabulary table")->required();
  sub->add_option("--new", o->new_table, "Added-vocabulary table")->required();
  sub->add_option("--out", o->out, "Merged matrix")->required();
  return [o](const Context& ctx) {
    SplitEmbeddings split{ReadMatrix(o->old_table), ReadMatrix(o->new_table)};
    if (split.new_table.rows() > 0 && split.new_table.cols() != split.old_table.cols()) {
      throw FormatError("tables differ in width");
    }
    const Matrix merged = Merge(split);
    WriteMatrix(merged, o->out);
    ctx.Result({{"rows", merged.rows()}, {"width", merged.cols()}, {"out", o->out}});
  };
}

Command AddInitEmbeddings(CLI::App& app) {
  auto* sub = app.add_subcommand("init-embeddings", "Draw the added-vocabulary rows");
  struct Opts {
    std::string old_table, new_table, out, scheme = "normal";
    std::optional<size_t> rows;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--old", o->old_table, "Existing-vocabulary table")->required();
  auto* shape = sub->add_option("--new", o->new_table, "Added table whose shape is reused");
  auto* rows = sub->add_option("--rows", o->rows, "Number of added rows");
  shape->excludes(rows);
  sub->add_option("--scheme", o->scheme, "normal (moments of old table) or zero")
      ->default_val("normal")
      ->check(CLI::IsMember({"normal", "zero"}));
  sub->add_option("--out", o->out, "Output added table")->required();
  return [o](const Context& ctx) {
    Matrix old_table = ReadMatrix(o->old_table);
    size_t n = 0;
    if (o->rows) {
      n = *o->rows;
    } else if (!o->new_table.empty()) {
      n = ReadMatrix(o->new_table).rows();
    } else {
      throw UsageError("need --new or --rows");
    }
    const size_t d = old_table.cols();
    SplitEmbeddings split{std::move(old_table), Matrix(n, d)};
    const SplitEmbeddings init =
        InitNewRows(split, ctx.global.seed,
                    o->scheme == "zero" ? InitScheme::kZero : InitScheme::kNormalFromOldStats);
    WriteMatrix(init.new_table, o->out);
    ctx.Result({{"rows", n}, {"width", d}, {"scheme", o->scheme}, {"seed", ctx.global.seed},
                {"out", o->out}});
  };
}

Command AddVocabReport(CLI::App& app) {
  auto* sub = app.add_subcommand("vocab-report", "Summarize a model");
  struct Opts {
    std::string model;
    std::optional<int64_t> expected_size;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--model", o->model, "Model file")->required();
  sub->add_option("--expected-size", o->expected_size,
                  "Report the difference to this vocabulary size");
  return [o](const Context& ctx) {
    const TokenizerModel model = LoadModel(ctx, o->model);
    std::map<std::string, size_t> kinds;
    size_t positive = 0;
    for (const auto& p : model.pieces()) {
      ++kinds[std::string(PieceKindName(p.kind))];
      if (p.kind == PieceKind::kNormal && *p.score > 0) ++positive;
    }
    const NormalizerConfig& nc = model.normalizer_config();
    Json j{{"size", model.size()},
           {"kinds",
            {{"normal", kinds["normal"]},
             {"unknown", kinds["unknown"]},
             {"control", kinds["control"]},
             {"unscored", kinds["unscored"]}}},
           {"positive_scores", positive},
           {"specials", SpecialsJson(model.specials())},
           {"normalizer",
            {{"max_char_repeat", nc.max_char_repeat},
             {"preserve_space", nc.preserve_space},
             {"lowercase", nc.lowercase}}},
           {"checksum", ModelChecksum(model)}};
    if (o->expected_size) {
      j["expected_size"] = *o->expected_size;
      j["delta"] = static_cast<int64_t>(model.size()) - *o->expected_size;
    }
    ctx.Result(j);
  };
}

void ReportError(std::ostream& err, const char* kind, const std::string& message) {
  err << Json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tokenizer vocabulary grafting toolkit", "vocab-graft"};
  app.require_subcommand(1);
  Context ctx{{}, &out, &err};
  app.add_option("--seed", ctx.global.seed, "Seed for every random choice")->default_val(0);
  app.add_option("--threads", ctx.global.threads, "Worker threads for corpus operations")
      ->default_val(1)
      ->check(CLI::PositiveNumber);
  app.add_flag("--quiet", ctx.global.quiet, "Suppress warnings");

  const auto kAll = [](CLI::App*) { return true; };
  std::map<const CLI::App*, Command> commands;
  for (auto add : {AddImportSpm, AddTransfer, AddTokenize, AddDecode, AddOov, AddDiff, AddChunk,
                   AddMaskAudit, AddScheduleDump, AddSplitEmbeddings, AddMergeEmbeddings,
                   AddInitEmbeddings, AddVocabReport}) {
    Command command = add(app);
    commands.emplace(app.get_subcommands(kAll).back(), std::move(command));
  }
  for (auto* sub : app.get_subcommands(kAll)) sub->fallthrough();

  std::vector<std::string> argv_storage = {"vocab-graft"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    ReportError(err, "usage", e.what());
    return kExitUsage;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  try {
    commands.at(chosen)(ctx);
  } catch (const UsageError& e) {
    ReportError(err, "usage", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    ReportError(err, "data", e.what());
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    ReportError(err, "data", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    ReportError(err, "data", e.what());
    return kExitData;
  }
  return kExitOk;
}

}  // namespace vocab_graft
