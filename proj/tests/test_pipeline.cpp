#include <gtest/gtest.h>

#include <filesystem>

#include "wordlearn/corpus_io.hpp"
#include "wordlearn/pipeline.hpp"
#include "wordlearn/synth.hpp"

using namespace wordlearn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("wordlearn_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small enough to run in a couple of seconds.
pipeline::ExperimentConfig small_config(const fs::path& out) {
  nlohmann::json json = {
      {"seed", 1},
      {"output_dir", out.string()},
      {"synth", {{"min_turns", 400}}},
      {"rl", {{"train", {{"instances", 60}}}, {"eval", {{"instances", 40}, {"eval_every", 10}}}, {"folds", 2}}},
  };
  return pipeline::config_from_json(json);
}

const pipeline::ManifestEntry* find_file(const pipeline::Manifest& m, const std::string& path) {
  for (const auto& f : m.files)
    if (f.path == path) return &f;
  return nullptr;
}

}  // namespace

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(pipeline::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(pipeline::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Config, DefaultsValidate) {
  pipeline::ExperimentConfig c;
  EXPECT_NO_THROW(pipeline::validate(c));
  EXPECT_EQ(c.gap_ms, 1100);
  EXPECT_EQ(c.rl.folds, 20u);
}

TEST(Config, UnknownFieldNamesTheField) {
  try {
    pipeline::config_from_json({{"sede", 3}});
    FAIL() << "expected ConfigError";
  } catch (const pipeline::ConfigError& e) {
    EXPECT_EQ(e.field(), "sede");
  }
  try {
    pipeline::config_from_json({{"rl", {{"train", {{"alpah", 0.1}}}}}});
    FAIL() << "expected ConfigError";
  } catch (const pipeline::ConfigError& e) {
    EXPECT_EQ(e.field(), "rl.train.alpah");
  }
}

TEST(Config, MissingLexiconFileNamesTheField) {
  try {
    pipeline::config_from_json({{"lexicon_file", "/nonexistent/lexicon.json"}});
    FAIL() << "expected ConfigError";
  } catch (const pipeline::ConfigError& e) {
    EXPECT_EQ(e.field(), "lexicon_file");
  }
}

TEST(Config, InvalidValuesRejected) {
  EXPECT_THROW(pipeline::config_from_json({{"gap_ms", 0}}), pipeline::ConfigError);
  EXPECT_THROW(pipeline::config_from_json({{"sim", {{"level", "sentence"}}}}), pipeline::ConfigError);
  EXPECT_THROW(pipeline::config_from_json({{"rl", {{"folds", 0}}}}), pipeline::ConfigError);
  EXPECT_THROW(pipeline::config_from_json({{"rl", {{"train", {{"epsilon", 1.5}}}}}}), pipeline::ConfigError);
  EXPECT_THROW(pipeline::config_from_json({{"source", "chat-log"}}), pipeline::ConfigError);
  EXPECT_THROW(pipeline::config_from_json({{"source", "xml"}, {"input", "/tmp"}}), pipeline::ConfigError);
}

TEST(Config, JsonRoundTrip) {
  const auto dir = scratch("roundtrip");
  const auto c = small_config(dir / "out");
  const auto again = pipeline::config_from_json(nlohmann::json::parse(pipeline::to_json(c).dump()));
  EXPECT_EQ(pipeline::to_json(again), pipeline::to_json(c));
}

TEST(Config, RelativePathsResolveAgainstFile) {
  const auto dir = scratch("relative");
  io::write_file(dir / "exp.json", R"({"output_dir": "results", "seed": 9})");
  const auto c = pipeline::load_config(dir / "exp.json");
  EXPECT_EQ(c.output_dir, dir / "results");
  EXPECT_EQ(c.seed, 9u);
}

TEST(Run, ProducesAllStagesAndFiles) {
  const auto dir = scratch("stages");
  const auto m = pipeline::run_pipeline(small_config(dir / "out"));
  EXPECT_EQ(m.stages, (std::vector<std::string>{"config", "source", "segment", "clean", "stats", "train-sim",
                                                "eval-sim", "rl-train", "rl-eval"}));
  for (const char* path : {"config.json", "source/log.jsonl", "sim/eval.csv", "sim/model.json", "rl/q.json",
                           "rl/curve.csv", "stats/stats.csv"}) {
    const auto* entry = find_file(m, path);
    ASSERT_NE(entry, nullptr) << path;
    const auto content = io::read_file(dir / "out" / path);
    EXPECT_EQ(entry->bytes, content.size());
    EXPECT_EQ(entry->sha256, pipeline::sha256_hex(content));
  }
  EXPECT_TRUE(fs::exists(dir / "out" / pipeline::kManifestFile));
  EXPECT_TRUE(std::is_sorted(m.files.begin(), m.files.end(),
                             [](const auto& a, const auto& b) { return a.path < b.path; }));
}

TEST(Run, SameSeedGivesIdenticalManifest) {
  const auto dir = scratch("repeat");
  const auto config = small_config(dir / "out");
  pipeline::run_pipeline(config);
  const auto first = io::read_file(dir / "out" / pipeline::kManifestFile);
  fs::remove_all(dir / "out");
  pipeline::run_pipeline(config);
  EXPECT_EQ(io::read_file(dir / "out" / pipeline::kManifestFile), first);
}

TEST(Run, DifferentSeedChangesOutputs) {
  const auto dir = scratch("seeds");
  auto a = small_config(dir / "a");
  auto b = small_config(dir / "b");
  b.seed = 2;
  const auto ma = pipeline::run_pipeline(a);
  const auto mb = pipeline::run_pipeline(b);
  EXPECT_NE(find_file(ma, "source/log.jsonl")->sha256, find_file(mb, "source/log.jsonl")->sha256);
}

TEST(Run, FailingStageIsNamed) {
  const auto dir = scratch("failing");
  auto c = small_config(dir / "out");
  c.source = "corpus-json";
  c.input = dir / "missing.json";
  try {
    pipeline::run_pipeline(c);
    FAIL() << "expected StageError";
  } catch (const pipeline::StageError& e) {
    EXPECT_EQ(e.stage(), "source");
  }
}

TEST(Ingest, CorpusJsonIsIdentity) {
  const auto dir = scratch("ingest_json");
  synth::SynthConfig sc;
  sc.min_turns = 200;
  const auto out = synth::generate(sc, 4);
  io::write_file(dir / "corpus.json", io::dump(io::to_json(out.corpus)));
  const auto back = pipeline::ingest(dir / "corpus.json", "corpus-json");
  EXPECT_EQ(io::to_json(back), io::to_json(out.corpus));
}

TEST(Ingest, ChatLogMatchesSegmentLog) {
  const auto dir = scratch("ingest_log");
  synth::SynthConfig sc;
  sc.min_turns = 200;
  const auto out = synth::generate(sc, 6);
  io::write_file(dir / "log.jsonl", io::write_log(out.events));
  pipeline::IngestOptions options;
  options.lexicon = sc.lexicon;
  const auto ingested = pipeline::ingest(dir / "log.jsonl", "chat-log", options);
  const auto direct = pipeline::segment_log(out.events, 1100, {}, sc.lexicon);
  EXPECT_EQ(io::to_json(ingested), io::to_json(direct));
  std::size_t turns = 0;
  for (const auto& d : ingested.dialogues) turns += d.turns.size();
  EXPECT_GT(turns, 0u);
}

TEST(Ingest, UnknownFormatThrows) {
  EXPECT_THROW(pipeline::ingest("/tmp", "xml"), std::invalid_argument);
  const auto& formats = pipeline::ingest_formats();
  EXPECT_NE(std::find(formats.begin(), formats.end(), "chat-log"), formats.end());
}
