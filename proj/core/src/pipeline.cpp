#include "wordlearn/pipeline.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "wordlearn/corpus_io.hpp"
#include "wordlearn/random.hpp"
#include "wordlearn/sim_eval.hpp"
#include "wordlearn/text.hpp"

namespace wordlearn::pipeline {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// ─── Ingest ──────────────────────────────────────────────────────────────────

const std::vector<std::string>& ingest_formats() {
  static const std::vector<std::string> formats{"corpus-json", "chat-log", "burchak"};
  return formats;
}

Corpus segment_log(const std::vector<CharEvent>& events, std::int64_t gap_ms,
                   const std::map<std::string, std::vector<VisualObject>>& objects,
                   const std::optional<AttributeLexicon>& lexicon) {
  std::map<std::string, std::vector<CharEvent>> by_session;
  for (const auto& e : events) by_session[e.session_id].push_back(e);
  Corpus out;
  out.lexicon = lexicon;
  for (const auto& [session, list] : by_session) {
    auto it = objects.find(session);
    auto dialogues = corpus::segment_turns(list, gap_ms, it == objects.end() ? std::vector<VisualObject>{} : it->second);
    for (auto& d : dialogues) {
      corpus::annotate_phenomena(d);
      out.dialogues.push_back(std::move(d));
    }
  }
  return out;
}

Corpus ingest(const fs::path& path, const std::string& format, const IngestOptions& options) {
  const auto& formats = ingest_formats();
  if (std::find(formats.begin(), formats.end(), format) == formats.end())
    throw std::invalid_argument("unknown ingest format '" + format + "'");
  if (!fs::exists(path)) throw std::invalid_argument("input not found: " + path.string());
  if (format == "corpus-json" || format == "burchak") {
    Corpus corpus = io::load_corpus(path);
    if (!corpus.lexicon) corpus.lexicon = options.lexicon;
    return corpus;
  }
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  std::vector<CharEvent> events;
  for (const auto& file : files) {
    auto parsed = io::parse_log(io::read_file(file));
    events.insert(events.end(), parsed.begin(), parsed.end());
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const CharEvent& a, const CharEvent& b) { return a.session_id < b.session_id; });
  return segment_log(events, options.gap_ms, options.objects, options.lexicon);
}

// ─── Experiment configuration ────────────────────────────────────────────────

synth::SynthConfig ExperimentConfig::default_synth_config() {
  synth::SynthConfig config;
  config.min_turns = 10000;
  return config;
}

namespace {

template <typename T>
T field(const nlohmann::json& json, const std::string& key, const std::string& path, T fallback) {
  if (!json.contains(key)) return fallback;
  try {
    return json.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + key, e.what());
  }
}

void reject_unknown(const nlohmann::json& json, const std::set<std::string>& known, const std::string& path) {
  if (!json.is_object()) throw ConfigError(path.empty() ? "<root>" : path.substr(0, path.size() - 1), "expected an object");
  for (const auto& [key, value] : json.items())
    if (!known.count(key)) throw ConfigError(path + key, "unknown field");
}

std::optional<fs::path> file_field(const nlohmann::json& json, const std::string& key, const fs::path& base) {
  if (!json.contains(key) || json.at(key).is_null()) return std::nullopt;
  fs::path p = field<std::string>(json, key, "", "");
  if (p.is_relative() && !base.empty()) p = base / p;
  if (!fs::exists(p)) throw ConfigError(key, "file not found: " + p.string());
  return p;
}

agent::LearningConfig learning_from_json(const nlohmann::json& json, agent::LearningConfig c, const std::string& path) {
  reject_unknown(json,
                 {"instances", "eval_every", "heldout_objects", "reset_grounding_every", "q_init", "alpha", "gamma",
                  "epsilon", "max_turns", "success_reward", "incoherence_penalty", "threshold", "c_inf", "c_ack_rej",
                  "c_crt"},
                 path);
  c.instances = field(json, "instances", path, c.instances);
  c.eval_every = field(json, "eval_every", path, c.eval_every);
  c.heldout_objects = field(json, "heldout_objects", path, c.heldout_objects);
  c.reset_grounding_every = field(json, "reset_grounding_every", path, c.reset_grounding_every);
  c.q_init = field(json, "q_init", path, c.q_init);
  c.params.alpha = field(json, "alpha", path, c.params.alpha);
  c.params.gamma = field(json, "gamma", path, c.params.gamma);
  c.params.epsilon = field(json, "epsilon", path, c.params.epsilon);
  c.episode.max_turns = field(json, "max_turns", path, c.episode.max_turns);
  c.episode.success_reward = field(json, "success_reward", path, c.episode.success_reward);
  c.episode.incoherence_penalty = field(json, "incoherence_penalty", path, c.episode.incoherence_penalty);
  c.episode.threshold = field(json, "threshold", path, c.episode.threshold);
  c.episode.costs.c_inf = field(json, "c_inf", path, c.episode.costs.c_inf);
  c.episode.costs.c_ack_rej = field(json, "c_ack_rej", path, c.episode.costs.c_ack_rej);
  c.episode.costs.c_crt = field(json, "c_crt", path, c.episode.costs.c_crt);
  return c;
}

ojson to_json(const agent::LearningConfig& c) {
  ojson out;
  out["instances"] = c.instances;
  out["eval_every"] = c.eval_every;
  out["heldout_objects"] = c.heldout_objects;
  out["reset_grounding_every"] = c.reset_grounding_every;
  out["q_init"] = c.q_init;
  out["alpha"] = c.params.alpha;
  out["gamma"] = c.params.gamma;
  out["epsilon"] = c.params.epsilon;
  out["max_turns"] = c.episode.max_turns;
  out["success_reward"] = c.episode.success_reward;
  out["incoherence_penalty"] = c.episode.incoherence_penalty;
  out["threshold"] = c.episode.threshold;
  out["c_inf"] = c.episode.costs.c_inf;
  out["c_ack_rej"] = c.episode.costs.c_ack_rej;
  out["c_crt"] = c.episode.costs.c_crt;
  return out;
}

}  // namespace

AttributeLexicon load_lexicon(const fs::path& path) {
  auto lexicon = lexicon_from_json(nlohmann::json::parse(io::read_file(path)));
  require_valid(lexicon);
  return lexicon;
}

corpus::CleaningRules load_rules(const fs::path& path) {
  const auto json = nlohmann::json::parse(io::read_file(path));
  reject_unknown(json, {"substitutions", "emoticons", "default_emoticons", "excluded"}, "");
  corpus::CleaningRules rules;
  if (json.value("default_emoticons", true)) rules.emoticon_patterns = corpus::default_emoticon_patterns();
  if (json.contains("emoticons"))
    for (const auto& p : json.at("emoticons")) rules.emoticon_patterns.push_back(p.get<std::string>());
  if (json.contains("substitutions"))
    for (const auto& [from, to] : json.at("substitutions").items()) rules.substitutions[from] = to.get<std::string>();
  if (json.contains("excluded"))
    for (const auto& span : json.at("excluded"))
      rules.excluded.push_back({span.at("dialogue").get<std::string>(), span.at("first_turn").get<int>(),
                                span.at("last_turn").get<int>()});
  if (auto errors = corpus::validate_rules(rules); !errors.empty()) throw ValidationError(errors);
  return rules;
}

ExperimentConfig config_from_json(const nlohmann::json& json, const fs::path& base_dir) {
  reject_unknown(json,
                 {"seed", "output_dir", "lexicon_file", "session_config", "cleaning_rules", "source", "input", "synth",
                  "gap_ms", "sim", "rl"},
                 "");
  ExperimentConfig c;
  c.seed = field(json, "seed", "", c.seed);
  if (json.contains("output_dir")) {
    fs::path out = field<std::string>(json, "output_dir", "", "");
    c.output_dir = out.is_relative() && !base_dir.empty() ? base_dir / out : out;
  }
  c.lexicon_file = file_field(json, "lexicon_file", base_dir);
  c.session_config = file_field(json, "session_config", base_dir);
  c.cleaning_rules = file_field(json, "cleaning_rules", base_dir);
  c.source = field(json, "source", "", c.source);
  c.input = file_field(json, "input", base_dir);
  if (json.contains("synth")) {
    try {
      c.synth = synth::config_from_json(json.at("synth"));
      if (!json.at("synth").contains("min_turns") && !json.at("synth").contains("dialogues"))
        c.synth.min_turns = ExperimentConfig::default_synth_config().min_turns;
    } catch (const std::exception& e) {
      throw ConfigError("synth", e.what());
    }
  }
  c.gap_ms = field(json, "gap_ms", "", c.gap_ms);
  if (json.contains("sim")) {
    const auto& sim = json.at("sim");
    reject_unknown(sim, {"level", "n"}, "sim.");
    if (sim.contains("level")) {
      try {
        c.level = sim::level_from_string(sim.at("level").get<std::string>());
      } catch (const std::exception& e) {
        throw ConfigError("sim.level", e.what());
      }
    }
    c.n = field(sim, "n", "sim.", c.n);
  }
  if (json.contains("rl")) {
    const auto& rl = json.at("rl");
    reject_unknown(rl, {"train", "eval", "folds"}, "rl.");
    if (rl.contains("train")) c.rl.train = learning_from_json(rl.at("train"), c.rl.train, "rl.train.");
    if (rl.contains("eval")) c.rl.eval = learning_from_json(rl.at("eval"), c.rl.eval, "rl.eval.");
    c.rl.folds = field(rl, "folds", "rl.", c.rl.folds);
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  nlohmann::json json;
  try {
    json = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("<file>", std::string("not valid JSON: ") + e.what());
  }
  return config_from_json(json, path.parent_path());
}

void validate(const ExperimentConfig& c) {
  if (c.source != "synth") {
    const auto& formats = ingest_formats();
    if (std::find(formats.begin(), formats.end(), c.source) == formats.end())
      throw ConfigError("source", "expected synth or an ingest format, got '" + c.source + "'");
    if (!c.input) throw ConfigError("input", "required when source is '" + c.source + "'");
  }
  if (c.output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
  if (c.gap_ms <= 0) throw ConfigError("gap_ms", "must be positive");
  if (c.n < 1) throw ConfigError("sim.n", "must be at least 1");
  if (c.rl.folds == 0) throw ConfigError("rl.folds", "must be positive");
  for (const auto& [name, lc] : {std::pair<std::string, const agent::LearningConfig*>{"rl.train", &c.rl.train},
                                 {"rl.eval", &c.rl.eval}}) {
    if (auto errors = agent::validate(lc->params); !errors.empty()) throw ConfigError(name, errors.front());
    if (lc->instances == 0) throw ConfigError(name + ".instances", "must be positive");
    if (lc->eval_every == 0) throw ConfigError(name + ".eval_every", "must be positive");
    if (lc->heldout_objects == 0) throw ConfigError(name + ".heldout_objects", "must be positive");
    if (lc->episode.max_turns < 1) throw ConfigError(name + ".max_turns", "must be positive");
  }
  if (c.source == "synth")
    if (auto errors = synth::validate_config(c.synth); !errors.empty()) throw ConfigError("synth", errors.front());
}

ojson to_json(const ExperimentConfig& c) {
  ojson out;
  out["seed"] = c.seed;
  out["output_dir"] = c.output_dir.string();
  out["lexicon_file"] = c.lexicon_file ? ojson(c.lexicon_file->string()) : ojson(nullptr);
  out["session_config"] = c.session_config ? ojson(c.session_config->string()) : ojson(nullptr);
  out["cleaning_rules"] = c.cleaning_rules ? ojson(c.cleaning_rules->string()) : ojson(nullptr);
  out["source"] = c.source;
  out["input"] = c.input ? ojson(c.input->string()) : ojson(nullptr);
  out["synth"] = synth::to_json(c.synth);
  out["gap_ms"] = c.gap_ms;
  out["sim"] = {{"level", std::string(sim::to_string(c.level))}, {"n", c.n}};
  out["rl"] = {{"train", to_json(c.rl.train)}, {"eval", to_json(c.rl.eval)}, {"folds", c.rl.folds}};
  return out;
}

// ─── Running ─────────────────────────────────────────────────────────────────

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 computation failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < length; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

ojson to_json(const Manifest& m) {
  ojson out;
  out["stages"] = m.stages;
  auto& files = out["files"] = ojson::array();
  for (const auto& f : m.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  out["summary"] = m.summary;
  return out;
}

namespace {

class Run {
 public:
  explicit Run(const ExperimentConfig& config) : config_(config), out_(config.output_dir) {}

  Manifest execute() {
    stage("config", [&] { lexicon_ = resolve_lexicon(); write("config.json", io::dump(pipeline::to_json(config_))); });
    stage("source", [&] { source(); });
    stage("segment", [&] { segment(); });
    stage("clean", [&] { clean(); });
    stage("stats", [&] { stats(); });
    stage("train-sim", [&] { train_sim(); });
    stage("eval-sim", [&] { eval_sim(); });
    stage("rl-train", [&] { rl_train(); });
    stage("rl-eval", [&] { rl_eval(); });
    manifest_.summary = summary_;
    std::sort(manifest_.files.begin(), manifest_.files.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
    io::write_file(out_ / kManifestFile, io::dump(pipeline::to_json(manifest_)));
    return manifest_;
  }

 private:
  template <typename F>
  void stage(const std::string& name, F&& body) {
    try {
      body();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
    manifest_.stages.push_back(name);
  }

  void write(const std::string& relative, const std::string& content) {
    io::write_file(out_ / relative, content);
    manifest_.files.push_back({relative, sha256_hex(content), content.size()});
  }

  AttributeLexicon resolve_lexicon() {
    if (config_.lexicon_file) return load_lexicon(*config_.lexicon_file);
    if (config_.source == "synth") return config_.synth.lexicon;
    return default_lexicon();
  }

  std::map<std::string, std::vector<VisualObject>> session_objects() {
    std::map<std::string, std::vector<VisualObject>> out;
    if (!config_.session_config) return out;
    for (const auto& s : chat_sessions()) out[s.first] = s.second;
    return out;
  }

  // Session configs are read here without the chat library: id and objects only.
  std::vector<std::pair<std::string, std::vector<VisualObject>>> chat_sessions() {
    const auto json = nlohmann::json::parse(io::read_file(*config_.session_config));
    std::vector<nlohmann::json> list;
    if (json.contains("sessions")) {
      for (const auto& s : json.at("sessions")) list.push_back(s);
    } else {
      list.push_back(json);
    }
    std::vector<std::pair<std::string, std::vector<VisualObject>>> out;
    for (const auto& s : list) {
      const AttributeLexicon lexicon = s.contains("lexicon") ? lexicon_from_json(s.at("lexicon")) : lexicon_;
      std::vector<VisualObject> objects;
      if (s.contains("objects")) {
        for (const auto& o : s.at("objects")) objects.push_back(object_from_json(o));
      } else {
        objects = make_object_sequence(lexicon, 9, s.value("object_seed", std::uint64_t{1}));
      }
      out.emplace_back(s.at("session").get<std::string>(), std::move(objects));
    }
    return out;
  }

  void source() {
    if (config_.source == "synth") {
      auto synth_config = config_.synth;
      synth_config.lexicon = lexicon_;
      const auto seed = derive_seed(config_.seed, "synth");
      synth_ = synth::generate(synth_config, seed);
      synth::write_output(*synth_, synth_config, seed, out_ / "source");
      for (const char* name : {"log.jsonl", "corpus.json", "gold.json", "objects.json"})
        record(std::string("source/") + name);
      events_ = synth_->events;
      corpus_ = synth_->corpus;
      objects_ = synth_->objects;
      return;
    }
    IngestOptions options;
    options.gap_ms = config_.gap_ms;
    options.lexicon = lexicon_;
    options.objects = session_objects();
    corpus_ = ingest(*config_.input, config_.source, options);
    if (!corpus_.lexicon) corpus_.lexicon = lexicon_;
    write("source/corpus.json", io::dump(io::to_json(corpus_)));
  }

  void record(const std::string& relative) {
    const auto content = io::read_file(out_ / relative);
    manifest_.files.push_back({relative, sha256_hex(content), content.size()});
  }

  void segment() {
    if (events_.empty()) {
      summary_["segmentation"] = "skipped: source has no keystroke log";
      return;
    }
    Corpus segmented = segment_log(events_, config_.gap_ms, objects_, lexicon_);
    write("segment/segmented.json", io::dump(io::to_json(segmented)));
    std::size_t matching = 0;
    const bool same_count = segmented.dialogues.size() == corpus_.dialogues.size();
    for (std::size_t i = 0; same_count && i < segmented.dialogues.size(); ++i) {
      const auto& a = segmented.dialogues[i].turns;
      const auto& b = corpus_.dialogues[i].turns;
      bool same = a.size() == b.size();
      for (std::size_t t = 0; same && t < a.size(); ++t)
        same = a[t].speaker == b[t].speaker && a[t].text == b[t].text && a[t].start_ms == b[t].start_ms &&
               a[t].end_ms == b[t].end_ms;
      matching += same;
    }
    summary_["segmentation"] = {{"dialogues", segmented.dialogues.size()},
                                {"dialogues_matching_gold", matching},
                                {"matches_gold", same_count && matching == corpus_.dialogues.size()}};
  }

  void clean() {
    if (!config_.cleaning_rules) return;
    auto result = corpus::clean(corpus_, load_rules(*config_.cleaning_rules));
    corpus_ = std::move(result.corpus);
    std::ostringstream report;
    report << "kind,dialogue,turn,before,after\n";
    for (const auto& c : result.report)
      report << corpus::to_string(c.kind) << ',' << csv_field(c.dialogue_id) << ',' << c.turn_id << ','
             << csv_field(c.before) << ',' << csv_field(c.after) << '\n';
    write("clean/report.csv", report.str());
    write("clean/corpus.json", io::dump(io::to_json(corpus_)));
    summary_["cleaning_changes"] = result.report.size();
  }

  void stats() {
    const auto s = corpus::compute_stats(corpus_);
    write("stats/stats.csv", corpus::stats_csv(s));
    summary_["corpus"] = {{"dialogues", s.dialogue_count},
                          {"turns", s.turn_count},
                          {"mean_turns_per_dialogue", corpus::format_mean(s.mean_turns_per_dialogue)},
                          {"overlaps", s.overlap_count}};
  }

  void train_sim() {
    for (std::size_t i = 0; i < corpus_.dialogues.size(); ++i)
      (i % 2 == 0 ? train_ : test_).dialogues.push_back(corpus_.dialogues[i]);
    train_.lexicon = test_.lexicon = lexicon_;
    if (train_.dialogues.empty() || test_.dialogues.empty())
      throw std::invalid_argument("need at least two dialogues for a train/test split");
    model_ = sim::train(train_, config_.n, config_.level, lexicon_);
    write("sim/model.json", io::dump(sim::to_json(*model_)));
  }

  void eval_sim() {
    const auto report = eval::evaluate(*model_, test_, config_.level);
    write("sim/eval.csv", eval::eval_csv(report));
    write("sim/summary.csv", eval::summary_csv(report));
    summary_["sim"] = {{"level", std::string(sim::to_string(config_.level))},
                       {"n", config_.n},
                       {"held_out_keys", report.total_keys},
                       {"accuracy", report.accuracy},
                       {"mean_kld", report.mean_kld}};
  }

  void rl_train() {
    if (model_->level == sim::Level::word)
      throw std::invalid_argument("a word-level model cannot drive the simulated tutor; use level act or utt");
    auto result = agent::train_policy(*model_, lexicon_, config_.rl.train, derive_seed(config_.seed, "rl-train"));
    write("rl/q.json", io::dump(agent::to_json(result.q, config_.rl.train.params)));
    write("rl/train_curve.csv", agent::curve_csv({{"sarsa", result.curve}}));
    q_ = std::move(result.q);
    summary_["rl_train"] = {{"episodes", config_.rl.train.instances},
                            {"total_reward", result.total_reward},
                            {"successes", result.successes},
                            {"incoherent_actions", result.incoherent_actions}};
  }

  void rl_eval() {
    const auto cmp = agent::compare_policies(*q_, *model_, lexicon_, config_.rl.eval, config_.rl.folds,
                                             derive_seed(config_.seed, "rl-eval"));
    write("rl/curve.csv", agent::curve_csv({{"learned", cmp.learned_mean}, {"rule", cmp.baseline_mean}}));
    std::ostringstream folds;
    folds << std::setprecision(10) << "fold,policy,r_perf,final_accuracy,cumulative_cost,incoherent_actions\n";
    for (std::size_t f = 0; f < cmp.learned.size(); ++f) {
      for (const auto& [name, r] : {std::pair<std::string, const agent::LearningResult*>{"learned", &cmp.learned[f]},
                                    {"rule", &cmp.baseline[f]}})
        folds << f << ',' << name << ',' << r->r_perf << ',' << r->final_accuracy << ','
              << r->curve.points.back().cumulative_cost << ',' << r->incoherent_actions << '\n';
    }
    write("rl/folds.csv", folds.str());
    summary_["rl"] = {{"folds", config_.rl.folds},
                      {"learned_r_perf", cmp.learned_r_perf},
                      {"rule_r_perf", cmp.baseline_r_perf},
                      {"ratio", cmp.ratio},
                      {"learned_accuracy", cmp.learned_accuracy},
                      {"rule_accuracy", cmp.baseline_accuracy}};
  }

  const ExperimentConfig& config_;
  fs::path out_;
  AttributeLexicon lexicon_;
  std::optional<synth::SynthOutput> synth_;
  std::vector<CharEvent> events_;
  std::map<std::string, std::vector<VisualObject>> objects_;
  Corpus corpus_, train_, test_;
  std::optional<sim::SimModel> model_;
  std::optional<agent::QTable> q_;
  Manifest manifest_;
  ojson summary_ = ojson::object();
};

}  // namespace

Manifest run_pipeline(const ExperimentConfig& config) {
  try {
    validate(config);
  } catch (const ConfigError& e) {
    throw StageError("config", e.what());
  }
  return Run(config).execute();
}

}  // namespace wordlearn::pipeline
