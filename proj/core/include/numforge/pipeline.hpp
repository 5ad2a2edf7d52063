#pragma once

#include "numforge/config.hpp"
#include "numforge/corpus.hpp"
#include "numforge/extractor.hpp"
#include "numforge/instructions.hpp"
#include "numforge/numeric_lex.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace numforge {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Everything one pipeline run needs, loaded from an INI-style file:
///
///   [corpus]        manifest, rules, rejoin_breaks, tokenizer
///   [extract]       n_min, n_max, r_ins
///   [choices]       r_nv, n_cho, s
///   [lexer]         structural_prefixes, structural_suffixes   (comma lists)
///   [instructions]  identifiers, template, emit_training, window_k
///   [run]           seed, out, jobs
///
/// Relative paths resolve against the config file's directory. Unknown
/// sections or keys are rejected.
struct RunConfig {
  PipelineConfig pipeline;
  StructuralKeywords keywords;
  std::filesystem::path manifest;
  std::filesystem::path rules;
  std::filesystem::path template_path;  // empty: built-in template
  std::filesystem::path out_dir = "out";
  std::filesystem::path config_path;    // where it was loaded from, if anywhere
  bool rejoin_breaks = true;
  std::string tokenizer = "default";
  std::vector<std::string> identifiers = default_identifiers(4);
  bool emit_training = true;
  std::size_t window_k = 512;
  unsigned jobs = 1;

  static RunConfig parse(std::string_view contents, const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);

  /// Applies FORGE_SEED when set.
  void apply_environment();

  /// PipelineConfig invariants plus identifier count and window size.
  void validate() const;

  BuildOptions build_options() const;
};

/// Stage outputs inside RunConfig::out_dir.
struct RunOutputs {
  std::filesystem::path corpus = "corpus.jsonl";
  std::filesystem::path stats = "stats.json";
  std::filesystem::path instances = "instances.jsonl";
  std::filesystem::path numct = "numct.jsonl";
  std::filesystem::path training = "tokens.jsonl";
  std::filesystem::path manifest = "run_manifest.json";
};

struct PreprocessResult {
  std::vector<CleanDocument> docs;
  CorpusStats stats;
};

PreprocessResult run_preprocess(const std::vector<RawDocument>& raw, const PreprocessRules& rules,
                                const CalibrationOptions& calibration, const Tokenizer& tokenizer,
                                unsigned jobs);

struct ExtractResult {
  std::size_t extracted = 0;  // N_ins before selection
  std::vector<Instance> selected;
};

/// Per-document extraction (parallel), concatenation in input order, then one
/// selection stream SeededRng::derive(seed, "select-instances").
ExtractResult run_extract(const std::vector<CleanDocument>& docs, const PipelineConfig& cfg,
                          const StructuralKeywords& keywords, unsigned jobs);

/// SHA-256 of the file contents, lowercase hex.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

/// preprocess -> extract -> build, writing every stage output plus
/// run_manifest.json into cfg.out_dir. Stage failures are rethrown with the
/// stage name prefixed and their ErrorKind preserved.
RunOutputs run_all(const RunConfig& cfg);

/// Recomputes the output digests recorded in a run manifest; returns the
/// names of files whose digest no longer matches.
std::vector<std::string> verify_manifest(const std::filesystem::path& manifest_path);

}  // namespace numforge
