// wordlearn: command line entry point for the chat server, corpus tools,
// tutor simulation, learning agent and whole-pipeline runs.

#include <CLI11.hpp>

#include <iostream>
#include <random>

#include "wordlearn/agent.hpp"
#include "wordlearn/chat.hpp"
#include "wordlearn/chat_server.hpp"
#include "wordlearn/corpus.hpp"
#include "wordlearn/corpus_io.hpp"
#include "wordlearn/pipeline.hpp"
#include "wordlearn/random.hpp"
#include "wordlearn/sim_eval.hpp"
#include "wordlearn/synth.hpp"
#include "wordlearn/text.hpp"
#include "wordlearn/tutor_sim.hpp"

namespace fs = std::filesystem;
using namespace wordlearn;
using ojson = nlohmann::ordered_json;

namespace {

nlohmann::json read_json(const fs::path& path) { return nlohmann::json::parse(io::read_file(path)); }

std::map<std::string, std::vector<VisualObject>> session_objects(const std::string& session_config) {
  std::map<std::string, std::vector<VisualObject>> out;
  if (session_config.empty()) return out;
  for (const auto& s : chat::session_configs_from_json(read_json(session_config))) out[s.session_id] = s.objects;
  return out;
}

AttributeLexicon lexicon_or_default(const std::string& path, const Corpus* corpus = nullptr) {
  if (!path.empty()) return pipeline::load_lexicon(path);
  if (corpus && corpus->lexicon) return *corpus->lexicon;
  return default_lexicon();
}

sim::SimModel load_model(const fs::path& path) { return sim::model_from_json(read_json(path)); }

void print_stats(const corpus::CorpusStats& s) {
  std::cout << "dialogues: " << s.dialogue_count << "\n"
            << "turns: " << s.turn_count << "\n"
            << "mean turns per dialogue: " << corpus::format_mean(s.mean_turns_per_dialogue) << "\n"
            << "overlaps: " << s.overlap_count << "\n";
}

// ─── serve ───────────────────────────────────────────────────────────────────

struct ServeArgs {
  std::uint16_t port = 8080;
  std::string address = "0.0.0.0";
  std::string session_config;
  std::string log_dir = "logs";
  std::size_t threads = 1;
};

int serve(const ServeArgs& a) {
  chat::Hub hub(fs::path(a.log_dir));
  for (auto& s : chat::session_configs_from_json(read_json(a.session_config))) hub.add_session(std::move(s));
  chat::Server server(hub, a.address, a.port, a.threads);
  server.start();
  server.stop_on_signals();
  std::cerr << "serving " << hub.session_ids().size() << " session(s) on " << a.address << ":" << server.port()
            << ", logs in " << a.log_dir << std::endl;
  server.wait();
  server.stop();
  return 0;
}

// ─── corpus ──────────────────────────────────────────────────────────────────

struct SegmentArgs {
  std::int64_t gap_ms = 1100;
  std::string session_config;
  std::string lexicon;
  std::string in, out;
};

int corpus_segment(const SegmentArgs& a) {
  pipeline::IngestOptions options;
  options.gap_ms = a.gap_ms;
  options.objects = session_objects(a.session_config);
  options.lexicon = lexicon_or_default(a.lexicon);
  const Corpus corpus = pipeline::ingest(a.in, "chat-log", options);
  io::save_corpus(a.out, corpus);
  print_stats(corpus::compute_stats(corpus));
  return 0;
}

struct StatsArgs {
  std::string in, csv, format = "corpus-json";
  std::int64_t gap_ms = 1100;
};

int corpus_stats(const StatsArgs& a) {
  pipeline::IngestOptions options;
  options.gap_ms = a.gap_ms;
  const auto stats = corpus::compute_stats(pipeline::ingest(a.in, a.format, options));
  print_stats(stats);
  if (!a.csv.empty()) io::write_file(a.csv, corpus::stats_csv(stats));
  return 0;
}

struct CleanArgs {
  std::string rules, in, out, report;
};

int corpus_clean(const CleanArgs& a) {
  const auto rules = a.rules.empty() ? corpus::CleaningRules::defaults() : pipeline::load_rules(a.rules);
  auto result = corpus::clean(io::load_corpus(a.in), rules);
  io::save_corpus(a.out, result.corpus);
  std::size_t by_kind[3] = {0, 0, 0};
  for (const auto& c : result.report) ++by_kind[static_cast<int>(c.kind)];
  std::cout << "substitutions: " << by_kind[0] << "\nemoticons removed: " << by_kind[1]
            << "\nturns excluded: " << by_kind[2] << "\n";
  if (!a.report.empty()) {
    std::string csv = "kind,dialogue,turn,before,after\n";
    for (const auto& c : result.report)
      csv += std::string(corpus::to_string(c.kind)) + "," + csv_field(c.dialogue_id) + "," +
             std::to_string(c.turn_id) + "," + csv_field(c.before) + "," + csv_field(c.after) + "\n";
    io::write_file(a.report, csv);
  }
  return 0;
}

struct SynthArgs {
  std::string config, out;
  std::uint64_t seed = 1;
  std::size_t min_turns = 0;
};

int corpus_synth(const SynthArgs& a) {
  synth::SynthConfig config = pipeline::ExperimentConfig::default_synth_config();
  if (!a.config.empty()) {
    config = synth::config_from_json(read_json(a.config));
    if (config.dialogues == 0 && config.min_turns == 0) config.min_turns = 10000;
  }
  if (a.min_turns) {
    config.min_turns = a.min_turns;
    config.dialogues = 0;
  }
  const auto output = synth::generate(config, a.seed);
  synth::write_output(output, config, a.seed, a.out);
  print_stats(corpus::compute_stats(output.corpus));
  return 0;
}

// ─── sim ─────────────────────────────────────────────────────────────────────

struct SimTrainArgs {
  std::string level = "act", lexicon, in, model;
  int n = 3;
};

int sim_train(const SimTrainArgs& a) {
  const Corpus corpus = io::load_corpus(a.in);
  const auto model = sim::train(corpus, a.n, sim::level_from_string(a.level), lexicon_or_default(a.lexicon, &corpus));
  io::write_file(a.model, io::dump(sim::to_json(model)));
  std::size_t keys = 0;
  for (const auto& table : model.counts.orders) keys += table.size();
  std::cout << "level " << sim::to_string(model.level) << ", n=" << model.n << ", " << keys << " keys, "
            << model.global.size() << " distinct items\n";
  return 0;
}

struct SimEvalArgs {
  std::string model, corpus, csv, summary;
};

int sim_eval(const SimEvalArgs& a) {
  const auto model = load_model(a.model);
  const auto report = eval::evaluate(model, io::load_corpus(a.corpus), model.level);
  if (!a.csv.empty()) io::write_file(a.csv, eval::eval_csv(report));
  if (!a.summary.empty()) io::write_file(a.summary, eval::summary_csv(report));
  std::cout << "keys: " << report.total_keys << "\naccuracy: " << report.accuracy << "\nmean kld: " << report.mean_kld
            << "\n";
  return 0;
}

struct SimRespondArgs {
  std::string model, object = "red,square", text;
  bool interactive = false;
  std::uint64_t seed = 1;
};

// Line protocol: each input line is one learner turn (an empty line is
// silence); each output line is {"utterance","acts","conditions"}.
int sim_respond(const SimRespondArgs& a) {
  const auto model = load_model(a.model);
  const auto comma = a.object.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("--object expects COLOR,SHAPE");
  VisualObject object{a.object.substr(0, comma), a.object.substr(comma + 1), {}};
  sim::DialogueState state{object, {}, {}, false};
  std::mt19937_64 rng(derive_seed(a.seed, "respond"));
  auto reply = [&](const std::string& text) {
    const auto turn = sim::respond(model, sim::LearnerTurn{text, {}}, state, rng);
    ojson out;
    out["utterance"] = turn.utterance;
    out["acts"] = canonical_sequence_string(turn.acts);
    out["conditions"] = to_string(state.conditions);
    out["complete"] = state.complete;
    std::cout << out.dump() << std::endl;
  };
  if (!a.interactive) {
    reply(a.text);
    return 0;
  }
  std::string line;
  while (!state.complete && std::getline(std::cin, line)) reply(line);
  return 0;
}

// ─── rl ──────────────────────────────────────────────────────────────────────

struct RlTrainArgs {
  std::string model, out, curve, lexicon;
  std::size_t episodes = 500;
  double alpha = 0.1, gamma = 1.0, epsilon = 0.2, q_init = 10.0;
  std::size_t reset_every = 100;
  std::uint64_t seed = 1;
};

int rl_train(const RlTrainArgs& a) {
  const auto tutor = load_model(a.model);
  auto config = agent::training_config();
  config.instances = a.episodes;
  config.params = {a.alpha, a.gamma, a.epsilon};
  config.q_init = a.q_init;
  config.reset_grounding_every = a.reset_every;
  const auto lexicon = a.lexicon.empty() ? tutor.lexicon : pipeline::load_lexicon(a.lexicon);
  const auto result = agent::train_policy(tutor, lexicon, config, a.seed);
  auto json = agent::to_json(result.q, config.params);
  json["tutor_model"] = fs::absolute(a.model).string();
  io::write_file(a.out, io::dump(json));
  if (!a.curve.empty()) io::write_file(a.curve, agent::curve_csv({{"sarsa", result.curve}}));
  std::cout << "episodes: " << a.episodes << "\nsuccesses: " << result.successes
            << "\ntotal reward: " << result.total_reward << "\nstates: " << result.q.entries().size() << "\n";
  return 0;
}

struct RlEvalArgs {
  std::string q, model, baseline = "rule", csv, summary, lexicon;
  std::size_t folds = 20, instances = 500, eval_every = 10;
  std::uint64_t seed = 1;
};

int rl_eval(const RlEvalArgs& a) {
  if (a.baseline != "rule") throw std::invalid_argument("only the rule baseline is available");
  const auto json = read_json(a.q);
  const auto q = agent::qtable_from_json(json);
  std::string model_path = a.model;
  if (model_path.empty()) model_path = json.value("tutor_model", "");
  if (model_path.empty()) throw std::invalid_argument("--model is required: the Q file names no tutor model");
  const auto tutor = load_model(model_path);
  agent::LearningConfig config;
  config.instances = a.instances;
  config.eval_every = a.eval_every;
  const auto lexicon = a.lexicon.empty() ? tutor.lexicon : pipeline::load_lexicon(a.lexicon);
  const auto cmp = agent::compare_policies(q, tutor, lexicon, config, a.folds, a.seed);
  if (!a.csv.empty())
    io::write_file(a.csv, agent::curve_csv({{"learned", cmp.learned_mean}, {"rule", cmp.baseline_mean}}));
  ojson summary;
  summary["folds"] = a.folds;
  summary["learned_r_perf"] = cmp.learned_r_perf;
  summary["rule_r_perf"] = cmp.baseline_r_perf;
  summary["ratio"] = cmp.ratio;
  summary["learned_accuracy"] = cmp.learned_accuracy;
  summary["rule_accuracy"] = cmp.baseline_accuracy;
  if (!a.summary.empty()) io::write_file(a.summary, io::dump(summary));
  std::cout << summary.dump(2) << "\n";
  return 0;
}

// ─── run ─────────────────────────────────────────────────────────────────────

struct RunArgs {
  std::string config, out, level;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> folds, episodes;
  std::optional<int> n;
};

int run(const RunArgs& a) {
  auto config = a.config.empty() ? pipeline::ExperimentConfig{} : pipeline::load_config(a.config);
  if (a.seed) config.seed = *a.seed;
  if (!a.out.empty()) config.output_dir = a.out;
  if (!a.level.empty()) config.level = sim::level_from_string(a.level);
  if (a.n) config.n = *a.n;
  if (a.folds) config.rl.folds = *a.folds;
  if (a.episodes) config.rl.train.instances = *a.episodes;
  const auto manifest = pipeline::run_pipeline(config);
  std::cout << manifest.summary.dump(2) << "\n"
            << manifest.files.size() << " files, manifest at " << (config.output_dir / pipeline::kManifestFile).string()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grounded word learning: chat server, corpus tools, tutor simulation and learning agent"};
  app.require_subcommand(1);

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Run the keystroke relay chat server");
  serve_cmd->add_option("--port", serve_args.port, "TCP port (0 picks a free port)")->capture_default_str();
  serve_cmd->add_option("--address", serve_args.address, "Bind address")->capture_default_str();
  serve_cmd->add_option("--session-config", serve_args.session_config, "Session config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  serve_cmd->add_option("--log-dir", serve_args.log_dir, "Directory for per-session JSONL logs")->capture_default_str();
  serve_cmd->add_option("--threads", serve_args.threads, "I/O threads")->capture_default_str();

  auto* corpus_cmd = app.add_subcommand("corpus", "Corpus processing");
  corpus_cmd->require_subcommand(1);
  SegmentArgs segment_args;
  auto* segment_cmd = corpus_cmd->add_subcommand("segment", "Segment keystroke logs into turns and dialogues");
  segment_cmd->add_option("--gap-ms", segment_args.gap_ms, "Largest in-turn gap")->capture_default_str();
  segment_cmd->add_option("--session-config", segment_args.session_config, "Attach objects from a session config");
  segment_cmd->add_option("--lexicon", segment_args.lexicon, "Lexicon JSON stored with the corpus");
  segment_cmd->add_option("IN", segment_args.in, "Log file or directory of .jsonl logs")->required();
  segment_cmd->add_option("OUT", segment_args.out, "Corpus JSON")->required();

  StatsArgs stats_args;
  auto* stats_cmd = corpus_cmd->add_subcommand("stats", "Corpus statistics");
  stats_cmd->add_option("IN", stats_args.in, "Corpus")->required();
  stats_cmd->add_option("--csv", stats_args.csv, "Write statistics CSV");
  stats_cmd->add_option("--format", stats_args.format, "corpus-json, chat-log or burchak")->capture_default_str();
  stats_cmd->add_option("--gap-ms", stats_args.gap_ms, "Gap for chat-log input")->capture_default_str();

  CleanArgs clean_args;
  auto* clean_cmd = corpus_cmd->add_subcommand("clean", "Apply spelling, emoticon and exclusion rules");
  clean_cmd->add_option("--rules", clean_args.rules, "Rules JSON (default: emoticons only)");
  clean_cmd->add_option("--report", clean_args.report, "Write the change report CSV");
  clean_cmd->add_option("IN", clean_args.in, "Corpus JSON")->required();
  clean_cmd->add_option("OUT", clean_args.out, "Cleaned corpus JSON")->required();

  SynthArgs synth_args;
  auto* synth_cmd = corpus_cmd->add_subcommand("synth", "Generate a synthetic keystroke corpus with gold annotations");
  synth_cmd->add_option("--config", synth_args.config, "Generator config JSON");
  synth_cmd->add_option("--seed", synth_args.seed, "Seed")->capture_default_str();
  synth_cmd->add_option("--min-turns", synth_args.min_turns, "Override the corpus size");
  synth_cmd->add_option("OUT", synth_args.out, "Output directory")->required();

  auto* sim_cmd = app.add_subcommand("sim", "Tutor simulation");
  sim_cmd->require_subcommand(1);
  SimTrainArgs sim_train_args;
  auto* sim_train_cmd = sim_cmd->add_subcommand("train", "Train an n-gram tutor simulation");
  sim_train_cmd->add_option("--level", sim_train_args.level, "utt, act or word")
      ->check(CLI::IsMember({"utt", "utterance", "act", "word"}))
      ->capture_default_str();
  sim_train_cmd->add_option("--n", sim_train_args.n, "n-gram order")->check(CLI::PositiveNumber)->capture_default_str();
  sim_train_cmd->add_option("--lexicon", sim_train_args.lexicon, "Lexicon JSON (default: the corpus lexicon)");
  sim_train_cmd->add_option("IN", sim_train_args.in, "Annotated corpus JSON")->required();
  sim_train_cmd->add_option("MODEL", sim_train_args.model, "Model JSON")->required();

  SimEvalArgs sim_eval_args;
  auto* sim_eval_cmd = sim_cmd->add_subcommand("eval", "Per-key accuracy and KLD against a corpus");
  sim_eval_cmd->add_option("--model", sim_eval_args.model, "Model JSON")->required();
  sim_eval_cmd->add_option("--corpus", sim_eval_args.corpus, "Held-out corpus JSON")->required();
  sim_eval_cmd->add_option("--csv", sim_eval_args.csv, "Per-key CSV");
  sim_eval_cmd->add_option("--summary", sim_eval_args.summary, "Per-condition summary CSV");

  SimRespondArgs respond_args;
  auto* respond_cmd = sim_cmd->add_subcommand("respond", "Query the simulated tutor");
  respond_cmd->add_option("--model", respond_args.model, "Model JSON")->required();
  respond_cmd->add_flag("--interactive", respond_args.interactive, "Read learner turns from stdin, one per line");
  respond_cmd->add_option("--text", respond_args.text, "Single learner turn (empty: silence)");
  respond_cmd->add_option("--object", respond_args.object, "COLOR,SHAPE ground labels")->capture_default_str();
  respond_cmd->add_option("--seed", respond_args.seed, "Seed")->capture_default_str();

  auto* rl_cmd = app.add_subcommand("rl", "Learning agent");
  rl_cmd->require_subcommand(1);
  RlTrainArgs rl_train_args;
  auto* rl_train_cmd = rl_cmd->add_subcommand("train", "Train a SARSA policy against the simulated tutor");
  rl_train_cmd->add_option("--model", rl_train_args.model, "Tutor simulation model JSON")->required();
  rl_train_cmd->add_option("--episodes", rl_train_args.episodes, "Training episodes")->capture_default_str();
  rl_train_cmd->add_option("--alpha", rl_train_args.alpha, "Learning rate")->capture_default_str();
  rl_train_cmd->add_option("--gamma", rl_train_args.gamma, "Discount")->capture_default_str();
  rl_train_cmd->add_option("--epsilon", rl_train_args.epsilon, "Exploration rate")->capture_default_str();
  rl_train_cmd->add_option("--q-init", rl_train_args.q_init, "Initial Q value")->capture_default_str();
  rl_train_cmd->add_option("--reset-every", rl_train_args.reset_every, "Fresh grounding every N episodes (0: never)")
      ->capture_default_str();
  rl_train_cmd->add_option("--lexicon", rl_train_args.lexicon, "Lexicon JSON (default: the model's)");
  rl_train_cmd->add_option("--seed", rl_train_args.seed, "Seed")->capture_default_str();
  rl_train_cmd->add_option("--out", rl_train_args.out, "Q table JSON")->required();
  rl_train_cmd->add_option("--curve", rl_train_args.curve, "Training curve CSV");

  RlEvalArgs rl_eval_args;
  auto* rl_eval_cmd = rl_cmd->add_subcommand("eval", "Compare a learned policy with the rule baseline");
  rl_eval_cmd->add_option("--q", rl_eval_args.q, "Q table JSON")->required();
  rl_eval_cmd->add_option("--model", rl_eval_args.model, "Tutor model JSON (default: the one named in the Q file)");
  rl_eval_cmd->add_option("--baseline", rl_eval_args.baseline, "Baseline policy")->capture_default_str();
  rl_eval_cmd->add_option("--folds", rl_eval_args.folds, "Folds")->capture_default_str();
  rl_eval_cmd->add_option("--instances", rl_eval_args.instances, "Instances per fold")->capture_default_str();
  rl_eval_cmd->add_option("--eval-every", rl_eval_args.eval_every, "Held-out test interval")->capture_default_str();
  rl_eval_cmd->add_option("--lexicon", rl_eval_args.lexicon, "Lexicon JSON (default: the model's)");
  rl_eval_cmd->add_option("--seed", rl_eval_args.seed, "Seed")->capture_default_str();
  rl_eval_cmd->add_option("--csv", rl_eval_args.csv, "Fold-averaged curves CSV");
  rl_eval_cmd->add_option("--summary", rl_eval_args.summary, "Summary JSON");

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run the whole pipeline and write a manifest");
  run_cmd->add_option("--config", run_args.config, "Experiment config JSON (default: built-in defaults)");
  run_cmd->add_option("--seed", run_args.seed, "Override seed");
  run_cmd->add_option("--out", run_args.out, "Override output directory");
  run_cmd->add_option("--level", run_args.level, "Override simulation level");
  run_cmd->add_option("--n", run_args.n, "Override n-gram order");
  run_cmd->add_option("--folds", run_args.folds, "Override evaluation folds");
  run_cmd->add_option("--episodes", run_args.episodes, "Override training episodes");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return serve(serve_args);
    if (*segment_cmd) return corpus_segment(segment_args);
    if (*stats_cmd) return corpus_stats(stats_args);
    if (*clean_cmd) return corpus_clean(clean_args);
    if (*synth_cmd) return corpus_synth(synth_args);
    if (*sim_train_cmd) return sim_train(sim_train_args);
    if (*sim_eval_cmd) return sim_eval(sim_eval_args);
    if (*respond_cmd) return sim_respond(respond_args);
    if (*rl_train_cmd) return rl_train(rl_train_args);
    if (*rl_eval_cmd) return rl_eval(rl_eval_args);
    if (*run_cmd) return run(run_args);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& line : e.errors()) std::cerr << "  " << line << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
