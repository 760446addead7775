#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wordlearn/agent.hpp"
#include "wordlearn/corpus.hpp"
#include "wordlearn/model.hpp"
#include "wordlearn/synth.hpp"
#include "wordlearn/tutor_sim.hpp"

namespace wordlearn::pipeline {

// A configuration problem tied to one field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument("config field '" + field + "': " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// A pipeline stage failed; what() is "stage <name>: <cause>".
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& cause)
      : std::runtime_error("stage " + stage + ": " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// ─── Ingest ──────────────────────────────────────────────────────────────────

// corpus-json  the documented corpus JSON
// chat-log     chat-service JSONL logs (a file or a directory of *.jsonl)
// burchak      adapter slot for the released human corpus; reads it once it
//              has been converted to the documented corpus JSON
const std::vector<std::string>& ingest_formats();

struct IngestOptions {
  std::int64_t gap_ms = 1100;
  std::optional<AttributeLexicon> lexicon;
  // Objects per session id, attached to chat-log dialogues by object index.
  std::map<std::string, std::vector<VisualObject>> objects;
};

// Throws std::invalid_argument for an unknown format.
Corpus ingest(const std::filesystem::path& path, const std::string& format, const IngestOptions& options = {});

// Segments events session by session, attaching that session's objects, and
// annotates phenomena. Same result as `corpus segment`.
Corpus segment_log(const std::vector<CharEvent>& events, std::int64_t gap_ms,
                   const std::map<std::string, std::vector<VisualObject>>& objects,
                   const std::optional<AttributeLexicon>& lexicon);

// ─── Experiment configuration ────────────────────────────────────────────────

struct RlConfig {
  agent::LearningConfig train = agent::training_config();
  agent::LearningConfig eval;
  std::size_t folds = 20;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";
  std::optional<std::filesystem::path> lexicon_file;
  std::optional<std::filesystem::path> session_config;
  std::optional<std::filesystem::path> cleaning_rules;
  // "synth" or one of ingest_formats()
  std::string source = "synth";
  std::optional<std::filesystem::path> input;
  synth::SynthConfig synth = default_synth_config();
  std::int64_t gap_ms = 1100;
  sim::Level level = sim::Level::act;
  int n = 3;
  RlConfig rl;

  static synth::SynthConfig default_synth_config();
};

// Relative paths in the file are resolved against `base_dir`. Unknown fields
// and missing referenced files raise ConfigError naming the field.
ExperimentConfig config_from_json(const nlohmann::json& json, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const ExperimentConfig& config);
// Throws ConfigError for the first invalid field.
void validate(const ExperimentConfig& config);

AttributeLexicon load_lexicon(const std::filesystem::path& path);
corpus::CleaningRules load_rules(const std::filesystem::path& path);

// ─── Running ─────────────────────────────────────────────────────────────────

struct ManifestEntry {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct Manifest {
  std::vector<std::string> stages;
  std::vector<ManifestEntry> files;
  nlohmann::ordered_json summary;
};

inline constexpr const char* kManifestFile = "manifest.json";

std::string sha256_hex(std::string_view data);

// source -> segment -> clean -> stats -> train-sim -> eval-sim -> rl-train ->
// rl-eval, then writes manifest.json. Every random stream is derived from
// config.seed. Throws StageError.
Manifest run_pipeline(const ExperimentConfig& config);

nlohmann::ordered_json to_json(const Manifest& manifest);

}  // namespace wordlearn::pipeline
