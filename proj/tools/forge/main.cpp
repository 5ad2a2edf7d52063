// forge: command-line front end for the numforge pipeline.
//
// Data goes to files named on the command line; progress and diagnostics go
// to stderr. Exit status: 0 ok, 2 config, 3 input, 4 numerical, 1 other.

#include "numforge/adapter_algebra.hpp"
#include "numforge/error.hpp"
#include "numforge/evalkit.hpp"
#include "numforge/io.hpp"
#include "numforge/nmlf.hpp"
#include "numforge/pipeline.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace numforge;
using ordered_json = nlohmann::ordered_json;

namespace {

void log(const std::string& msg) { std::cerr << "forge: " << msg << '\n'; }

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return 2;
    case ErrorKind::kInput:
      return 3;
    case ErrorKind::kNumerical:
      return 4;
    case ErrorKind::kInternal:
      break;
  }
  return 1;
}

// Flags that override values from --config.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_min, n_max, n_cho, window_k;
  std::optional<std::string> r_ins, r_nv, s, out;
  std::optional<unsigned> jobs;

  void attach(CLI::App* cmd, bool with_out) {
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--n-min", n_min, "minimum paragraphs per instance");
    cmd->add_option("--n-max", n_max, "maximum paragraphs per instance");
    cmd->add_option("--r-ins", r_ins, "instance selection ratio");
    cmd->add_option("--r-nv", r_nv, "numeric variable selection ratio");
    cmd->add_option("--n-cho", n_cho, "choices per question");
    cmd->add_option("--s", s, "integer distractor scale");
    cmd->add_option("--jobs", jobs, "worker thread cap")->check(CLI::PositiveNumber);
    if (with_out) cmd->add_option("--out", out, "output directory");
  }

  void apply(RunConfig& cfg) const {
    auto dec = [](const std::string& name, const std::string& v) {
      try {
        return Decimal::parse(v);
      } catch (const Error&) {
        throw ConfigError(name + ": expected a decimal number, got '" + v + "'");
      }
    };
    if (seed) cfg.pipeline.seed = *seed;
    if (n_min) cfg.pipeline.n_min = *n_min;
    if (n_max) cfg.pipeline.n_max = *n_max;
    if (n_cho) {
      cfg.pipeline.n_cho = *n_cho;
      if (cfg.identifiers.size() != *n_cho && *n_cho <= 26) cfg.identifiers = default_identifiers(*n_cho);
    }
    if (r_ins) cfg.pipeline.r_ins = dec("--r-ins", *r_ins);
    if (r_nv) cfg.pipeline.r_nv = dec("--r-nv", *r_nv);
    if (s) cfg.pipeline.s = dec("--s", *s);
    if (window_k) cfg.window_k = *window_k;
    if (jobs) cfg.jobs = *jobs;
    if (out) cfg.out_dir = *out;
  }
};

RunConfig load_config(const std::string& path, const Overrides& ov) {
  RunConfig cfg = path.empty() ? RunConfig{} : RunConfig::load(path);
  cfg.apply_environment();
  ov.apply(cfg);
  cfg.validate();
  return cfg;
}

fs::path corpus_file(const fs::path& p) {
  return fs::is_directory(p) ? p / RunOutputs{}.corpus : p;
}

AdapterDelta load_delta(const fs::path& path, std::optional<std::size_t> rank) {
  const TensorFile file = read_nmlf(path);
  const std::string name = path.stem().string();
  AdapterDelta d = is_factor_file(file) ? expand_delta(adapter_from_tensors(file, name))
                                        : delta_from_tensors(file, name);
  if (rank) d.effective_rank = *rank;
  log("loaded " + path.string() + ": " + std::to_string(d.layers.size()) + " layers, rank " +
      std::to_string(d.effective_rank));
  return d;
}

ordered_json question_json(const EvalQuestion& q) {
  return ordered_json{{"qid", q.qid},
                      {"subject", q.subject},
                      {"subdomain", to_string(q.subdomain)},
                      {"stem", q.stem},
                      {"options", q.options},
                      {"gold", q.gold},
                      {"class", to_string(classify_question(q))}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numforge dataset and adapter toolkit"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  // preprocess
  std::string pp_manifest, pp_rules, pp_out, pp_tokenizer = "default";
  bool pp_no_rejoin = false;
  unsigned pp_jobs = 1;
  auto* preprocess = app.add_subcommand("preprocess", "filter, refine, calibrate and segment a raw corpus");
  preprocess->add_option("--manifest", pp_manifest, "corpus manifest JSON")->required();
  preprocess->add_option("--rules", pp_rules, "filter/refine rule file")->required();
  preprocess->add_option("--out", pp_out, "output directory")->required();
  preprocess->add_option("--tokenizer", pp_tokenizer, "tokenizer for statistics");
  preprocess->add_flag("--no-rejoin-breaks", pp_no_rejoin, "do not rejoin numbers split across line breaks");
  preprocess->add_option("--jobs", pp_jobs, "worker thread cap")->check(CLI::PositiveNumber);

  // extract
  std::string ex_corpus, ex_config, ex_out;
  Overrides ex_ov;
  auto* extract = app.add_subcommand("extract", "extract and sample paragraph instances");
  extract->add_option("--corpus", ex_corpus, "preprocess output directory or corpus.jsonl")->required();
  extract->add_option("--config", ex_config, "pipeline config file");
  extract->add_option("--out", ex_out, "instances JSONL")->required();
  ex_ov.attach(extract, false);

  // build
  std::string bd_instances, bd_config, bd_out, bd_training;
  Overrides bd_ov;
  auto* build = app.add_subcommand("build", "generate multiple-choice cloze instructions");
  build->add_option("--instances", bd_instances, "instances JSONL")->required();
  build->add_option("--config", bd_config, "pipeline config file");
  build->add_option("--out", bd_out, "instruction JSONL")->required();
  build->add_option("--emit-training", bd_training, "also write tokenized training examples here");
  build->add_option("--window", bd_ov.window_k, "conditioning window size k");
  bd_ov.attach(build, false);

  // stats
  std::string st_corpus, st_out, st_tokenizer = "default";
  auto* stats = app.add_subcommand("stats", "corpus statistics of a preprocessed corpus");
  stats->add_option("--corpus", st_corpus, "preprocess output directory or corpus.jsonl")->required();
  stats->add_option("--out", st_out, "statistics JSON")->required();
  stats->add_option("--tokenizer", st_tokenizer, "tokenizer name");

  // mix
  std::string mx_a, mx_b, mx_method = "svd", mx_out, mx_dtype = "f64";
  std::optional<std::size_t> mx_rank_a, mx_rank_b;
  unsigned mx_jobs = 1;
  auto* mix = app.add_subcommand("mix", "combine two adapters into one delta");
  mix->add_option("--a", mx_a, "first adapter (.nmlf)")->required();
  mix->add_option("--b", mx_b, "second adapter (.nmlf)")->required();
  mix->add_option("--method", mx_method, "svd, mean or sum")
      ->check(CLI::IsMember({"svd", "mean", "sum"}));
  mix->add_option("--out", mx_out, "mixed delta (.nmlf)")->required();
  mix->add_option("--rank-a", mx_rank_a, "declared rank of --a");
  mix->add_option("--rank-b", mx_rank_b, "declared rank of --b");
  mix->add_option("--dtype", mx_dtype, "output element type")->check(CLI::IsMember({"f32", "f64"}));
  mix->add_option("--jobs", mx_jobs, "worker thread cap")->check(CLI::PositiveNumber);

  // merge
  std::string mg_base, mg_delta, mg_out;
  bool mg_negate = false;
  auto* merge_cmd = app.add_subcommand("merge", "add a delta onto base weights");
  merge_cmd->add_option("--base", mg_base, "base weights (.nmlf)")->required();
  merge_cmd->add_option("--delta", mg_delta, "delta or adapter (.nmlf)")->required();
  merge_cmd->add_option("--out", mg_out, "merged weights (.nmlf)")->required();
  merge_cmd->add_flag("--negate", mg_negate, "subtract the delta instead of adding it");

  // eval-split
  std::string es_in, es_out;
  auto* eval_split = app.add_subcommand("eval-split", "label evaluation questions numeric / non_numeric");
  eval_split->add_option("--in", es_in, "questions (.jsonl or .csv)")->required();
  eval_split->add_option("--out", es_out, "labelled questions JSONL")->required();

  // score
  std::string sc_questions, sc_predictions, sc_out, sc_table;
  auto* score_cmd = app.add_subcommand("score", "accuracy report per sub-domain and class");
  score_cmd->add_option("--questions", sc_questions, "questions (.jsonl or .csv)")->required();
  score_cmd->add_option("--predictions", sc_predictions, "predictions JSONL")->required();
  score_cmd->add_option("--out", sc_out, "report JSON")->required();
  score_cmd->add_option("--table", sc_table, "also write the aligned text table here");

  // run-all
  std::string ra_config;
  Overrides ra_ov;
  auto* run_all_cmd = app.add_subcommand("run-all", "preprocess, extract and build in one run");
  run_all_cmd->add_option("--config", ra_config, "pipeline config file")->required();
  run_all_cmd->add_option("--window", ra_ov.window_k, "conditioning window size k");
  ra_ov.attach(run_all_cmd, true);

  // verify
  std::string vf_manifest;
  auto* verify = app.add_subcommand("verify", "check output digests recorded in a run manifest");
  verify->add_option("--manifest", vf_manifest, "run_manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*preprocess) {
      const auto raw = load_raw_corpus(pp_manifest);
      const auto rules = PreprocessRules::load(pp_rules);
      const auto tokenizer = make_tokenizer(pp_tokenizer);
      const auto r = run_preprocess(raw, rules, CalibrationOptions{!pp_no_rejoin}, *tokenizer, pp_jobs);
      const RunOutputs names;
      write_text_file(fs::path(pp_out) / names.corpus, corpus_to_jsonl(r.docs));
      write_text_file(fs::path(pp_out) / names.stats, stats_to_json(r.stats, tokenizer->name()));
      log("preprocessed " + std::to_string(r.docs.size()) + " documents, " +
          std::to_string(r.stats.num_tokens) + " tokens");
    } else if (*extract) {
      const RunConfig cfg = load_config(ex_config, ex_ov);
      const auto docs = corpus_from_jsonl(read_text_file(corpus_file(ex_corpus)));
      const auto r = run_extract(docs, cfg.pipeline, cfg.keywords, cfg.jobs);
      write_text_file(ex_out, instances_to_jsonl(r.selected));
      log("extracted " + std::to_string(r.extracted) + " instances, selected " +
          std::to_string(r.selected.size()));
    } else if (*build) {
      const RunConfig cfg = load_config(bd_config, bd_ov);
      const auto instances = instances_from_jsonl(read_text_file(bd_instances));
      const auto instructions = build_dataset(instances, cfg.pipeline, cfg.build_options());
      write_text_file(bd_out, instructions_to_jsonl(instructions));
      if (!bd_training.empty()) {
        const auto tokenizer = make_tokenizer(cfg.tokenizer);
        std::vector<TrainingExample> examples;
        for (const auto& ins : instructions) {
          examples.push_back(make_training_example(ins.pair, *tokenizer, cfg.window_k));
        }
        write_text_file(bd_training, training_to_jsonl(instructions, examples));
      }
      log("built " + std::to_string(instructions.size()) + " instructions from " +
          std::to_string(instances.size()) + " instances");
    } else if (*stats) {
      const auto docs = corpus_from_jsonl(read_text_file(corpus_file(st_corpus)));
      const auto tokenizer = make_tokenizer(st_tokenizer);
      write_text_file(st_out, stats_to_json(corpus_stats(docs, *tokenizer), tokenizer->name()));
    } else if (*mix) {
      const AdapterDelta a = load_delta(mx_a, mx_rank_a);
      const AdapterDelta b = load_delta(mx_b, mx_rank_b);
      AdapterDelta mixed = mx_method == "mean" ? mix_mean(a, b)
                           : mx_method == "sum" ? mix_sum(a, b)
                                                : mix_svd(a, b, mx_jobs);
      mixed.name = mx_method;
      write_nmlf(mx_out, delta_to_tensors(mixed, mx_dtype == "f32" ? DType::kF32 : DType::kF64));
      log("mixed (" + mx_method + ") " + std::to_string(mixed.layers.size()) + " layers, rank " +
          std::to_string(mixed.effective_rank));
    } else if (*merge_cmd) {
      const TensorFile base_file = read_nmlf(mg_base);
      AdapterDelta d = load_delta(mg_delta, std::nullopt);
      if (mg_negate) d = negate(d);
      const WeightSet merged = merge(weights_from_tensors(base_file), d);
      TensorFile out;
      for (const auto& e : base_file.entries) {
        const auto it = merged.find(e.name);
        out.entries.push_back(TensorEntry{e.name, e.dtype, it == merged.end() ? e.data : it->second});
      }
      write_nmlf(mg_out, out);
      log("merged " + std::to_string(d.layers.size()) + " layers into " + std::to_string(merged.size()));
    } else if (*eval_split) {
      const auto questions = load_questions(es_in);
      std::string out;
      std::size_t numeric = 0;
      for (const auto& q : questions) {
        if (classify_question(q) == QuestionClass::kNumeric) ++numeric;
        out += question_json(q).dump() + "\n";
      }
      write_text_file(es_out, out);
      log(std::to_string(numeric) + " numeric, " + std::to_string(questions.size() - numeric) +
          " non-numeric");
    } else if (*score_cmd) {
      const auto questions = load_questions(sc_questions);
      const auto predictions = parse_predictions_jsonl(read_text_file(sc_predictions));
      const ScoreReport report = score(questions, predictions);
      write_text_file(sc_out, report.to_json());
      if (!sc_table.empty()) write_text_file(sc_table, report.to_table());
      log("scored " + std::to_string(questions.size()) + " questions");
    } else if (*run_all_cmd) {
      const RunConfig cfg = load_config(ra_config, ra_ov);
      log("run-all seed " + std::to_string(cfg.pipeline.seed) + " -> " + cfg.out_dir.string());
      const RunOutputs out = run_all(cfg);
      log("wrote " + (cfg.out_dir / out.manifest).string());
    } else if (*verify) {
      const auto bad = verify_manifest(vf_manifest);
      for (const auto& name : bad) log("digest mismatch: " + name);
      if (!bad.empty()) return 3;
      log("all output digests match");
    }
  } catch (const Error& e) {
    log(std::string("error: ") + e.what());
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    log(std::string("error: ") + e.what());
    return 3;
  } catch (const fs::filesystem_error& e) {
    log(std::string("error: ") + e.what());
    return 3;
  } catch (const std::exception& e) {
    log(std::string("internal error: ") + e.what());
    return 1;
  }
  return 0;
}
