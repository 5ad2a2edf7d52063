#include "numforge/pipeline.hpp"

#include "numforge/error.hpp"
#include "numforge/io.hpp"
#include "numforge/parallel.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <set>
#include <sstream>

namespace numforge {

using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    const std::string_view t = trim(cur);
    if (!t.empty()) out.emplace_back(t);
    cur.clear();
  };
  for (char c : value) {
    if (c == ',') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

std::size_t to_count(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size() || x < 0) throw std::invalid_argument(v);
    return static_cast<std::size_t>(x);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size() || v.find('-') != std::string::npos) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an unsigned 64-bit integer, got '" + v + "'");
  }
}

Decimal to_decimal(const std::string& key, const std::string& v) {
  try {
    return Decimal::parse(v);
  } catch (const Error&) {
    throw ConfigError(key + ": expected a decimal number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& v) {
  std::filesystem::path p(v);
  return p.is_relative() && !base.empty() ? base / p : p;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <class Fn>
auto stage(std::string_view name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), "[" + std::string(name) + "] " + e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    throw Error(ErrorKind::kInput, "[" + std::string(name) + "] " + e.what());
  }
}

ordered_json config_json(const RunConfig& cfg) {
  const auto& p = cfg.pipeline;
  return ordered_json{
      {"corpus",
       {{"manifest", cfg.manifest.string()},
        {"rules", cfg.rules.string()},
        {"rejoin_breaks", cfg.rejoin_breaks},
        {"tokenizer", cfg.tokenizer}}},
      {"extract", {{"n_min", p.n_min}, {"n_max", p.n_max}, {"r_ins", p.r_ins.to_string()}}},
      {"choices", {{"r_nv", p.r_nv.to_string()}, {"n_cho", p.n_cho}, {"s", p.s.to_string()}}},
      {"lexer",
       {{"structural_prefixes", cfg.keywords.prefixes},
        {"structural_suffixes", cfg.keywords.suffixes}}},
      {"instructions",
       {{"identifiers", cfg.identifiers},
        {"template", cfg.template_path.string()},
        {"emit_training", cfg.emit_training},
        {"window_k", cfg.window_k}}},
      {"run", {{"seed", p.seed}, {"out", cfg.out_dir.string()}, {"jobs", cfg.jobs}}}};
}

}  // namespace

RunConfig RunConfig::parse(std::string_view contents, const std::filesystem::path& base_dir) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(contents)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config: key '" + section + "' outside any section");
    }
    for (const auto& [key_raw, node] : body) {
      const std::string key = section + "." + key_raw;
      const std::string v(trim(node.data()));
      if (key == "corpus.manifest") {
        cfg.manifest = resolve(base_dir, v);
      } else if (key == "corpus.rules") {
        cfg.rules = resolve(base_dir, v);
      } else if (key == "corpus.rejoin_breaks") {
        cfg.rejoin_breaks = to_bool(key, v);
      } else if (key == "corpus.tokenizer") {
        make_tokenizer(v);
        cfg.tokenizer = v;
      } else if (key == "extract.n_min") {
        cfg.pipeline.n_min = to_count(key, v);
      } else if (key == "extract.n_max") {
        cfg.pipeline.n_max = to_count(key, v);
      } else if (key == "extract.r_ins") {
        cfg.pipeline.r_ins = to_decimal(key, v);
      } else if (key == "choices.r_nv") {
        cfg.pipeline.r_nv = to_decimal(key, v);
      } else if (key == "choices.n_cho") {
        cfg.pipeline.n_cho = to_count(key, v);
      } else if (key == "choices.s") {
        cfg.pipeline.s = to_decimal(key, v);
      } else if (key == "lexer.structural_prefixes") {
        cfg.keywords.prefixes = split_list(v);
      } else if (key == "lexer.structural_suffixes") {
        cfg.keywords.suffixes = split_list(v);
      } else if (key == "instructions.identifiers") {
        cfg.identifiers = split_list(v);
      } else if (key == "instructions.template") {
        cfg.template_path = v.empty() ? std::filesystem::path() : resolve(base_dir, v);
      } else if (key == "instructions.emit_training") {
        cfg.emit_training = to_bool(key, v);
      } else if (key == "instructions.window_k") {
        cfg.window_k = to_count(key, v);
      } else if (key == "run.seed") {
        cfg.pipeline.seed = to_u64(key, v);
      } else if (key == "run.out") {
        cfg.out_dir = resolve(base_dir, v);
      } else if (key == "run.jobs") {
        cfg.jobs = static_cast<unsigned>(std::max<std::size_t>(1, to_count(key, v)));
      } else {
        throw ConfigError("config: unknown key '" + key + "'");
      }
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw InputError("config file not found: " + path.string());
  RunConfig cfg = parse(read_text_file(path), path.parent_path());
  cfg.config_path = path;
  return cfg;
}

void RunConfig::apply_environment() {
  if (const char* s = std::getenv("FORGE_SEED"); s != nullptr && *s != '\0') {
    pipeline.seed = to_u64("FORGE_SEED", s);
  }
}

void RunConfig::validate() const {
  pipeline.validate();
  if (identifiers.size() != pipeline.n_cho) {
    throw ConfigError("instructions.identifiers has " + std::to_string(identifiers.size()) +
                      " entries but n_cho is " + std::to_string(pipeline.n_cho));
  }
  if (std::set<std::string>(identifiers.begin(), identifiers.end()).size() != identifiers.size()) {
    throw ConfigError("instructions.identifiers must be distinct");
  }
  if (window_k < 1) throw ConfigError("instructions.window_k must be >= 1");
}

BuildOptions RunConfig::build_options() const {
  BuildOptions opts;
  opts.identifiers = identifiers;
  if (!template_path.empty()) opts.prompt = PromptTemplate::load(template_path);
  opts.jobs = jobs;
  return opts;
}

PreprocessResult run_preprocess(const std::vector<RawDocument>& raw, const PreprocessRules& rules,
                                const CalibrationOptions& calibration, const Tokenizer& tokenizer,
                                unsigned jobs) {
  PreprocessResult out;
  out.docs.resize(raw.size());
  parallel_for(raw.size(), jobs,
               [&](std::size_t i) { out.docs[i] = preprocess_document(raw[i], rules, calibration); });
  out.stats = corpus_stats(out.docs, tokenizer);
  return out;
}

ExtractResult run_extract(const std::vector<CleanDocument>& docs, const PipelineConfig& cfg,
                          const StructuralKeywords& keywords, unsigned jobs) {
  std::vector<std::vector<Instance>> per_doc(docs.size());
  parallel_for(docs.size(), jobs,
               [&](std::size_t i) { per_doc[i] = extract_instances(docs[i], cfg, keywords); });
  std::vector<Instance> all;
  for (auto& group : per_doc) {
    for (auto& inst : group) all.push_back(std::move(inst));
  }
  ExtractResult out;
  out.extracted = all.size();
  SeededRng rng = SeededRng::derive(cfg.seed, "select-instances");
  out.selected = select_instances(all, cfg, rng);
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::kInternal, "SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text_file(path)); }

RunOutputs run_all(const RunConfig& cfg) {
  const std::string started = utc_now();
  stage("config", [&] { cfg.validate(); });
  if (cfg.manifest.empty()) throw ConfigError("[config] corpus.manifest is not set");
  if (cfg.rules.empty()) throw ConfigError("[config] corpus.rules is not set");

  RunOutputs out;
  const auto& dir = cfg.out_dir;
  auto at = [&](const std::filesystem::path& p) { return dir / p; };
  stage("output", [&] { std::filesystem::create_directories(dir); });

  const auto tokenizer = make_tokenizer(cfg.tokenizer);
  const PreprocessResult pre = stage("preprocess", [&] {
    if (!std::filesystem::exists(cfg.manifest)) {
      throw InputError("manifest not found: " + cfg.manifest.string());
    }
    const auto raw = load_raw_corpus(cfg.manifest);
    const auto rules = PreprocessRules::load(cfg.rules);
    auto r = run_preprocess(raw, rules, CalibrationOptions{cfg.rejoin_breaks}, *tokenizer, cfg.jobs);
    write_text_file(at(out.corpus), corpus_to_jsonl(r.docs));
    write_text_file(at(out.stats), stats_to_json(r.stats, tokenizer->name()));
    return r;
  });

  const ExtractResult ext = stage("extract", [&] {
    auto r = run_extract(pre.docs, cfg.pipeline, cfg.keywords, cfg.jobs);
    write_text_file(at(out.instances), instances_to_jsonl(r.selected));
    return r;
  });

  stage("build", [&] {
    const auto instructions = build_dataset(ext.selected, cfg.pipeline, cfg.build_options());
    write_text_file(at(out.numct), instructions_to_jsonl(instructions));
    if (cfg.emit_training) {
      std::vector<TrainingExample> examples;
      examples.reserve(instructions.size());
      for (const auto& ins : instructions) {
        examples.push_back(make_training_example(ins.pair, *tokenizer, cfg.window_k));
      }
      write_text_file(at(out.training), training_to_jsonl(instructions, examples));
    }
  });

  stage("manifest", [&] {
    ordered_json inputs = ordered_json::object();
    if (!cfg.config_path.empty()) inputs[cfg.config_path.string()] = sha256_file(cfg.config_path);
    inputs[cfg.manifest.string()] = sha256_file(cfg.manifest);
    for (const auto& f : raw_corpus_files(cfg.manifest)) inputs[f.string()] = sha256_file(f);
    inputs[cfg.rules.string()] = sha256_file(cfg.rules);
    if (!cfg.template_path.empty()) inputs[cfg.template_path.string()] = sha256_file(cfg.template_path);

    ordered_json outputs = ordered_json::object();
    std::vector<std::filesystem::path> files{out.corpus, out.stats, out.instances, out.numct};
    if (cfg.emit_training) files.push_back(out.training);
    for (const auto& f : files) outputs[f.string()] = sha256_file(at(f));

    const ordered_json manifest{{"tool", "forge"},
                                {"tool_version", kToolVersion},
                                {"seed", cfg.pipeline.seed},
                                {"config", config_json(cfg)},
                                {"counts",
                                 {{"documents", pre.stats.num_documents},
                                  {"instances_extracted", ext.extracted},
                                  {"instances_selected", ext.selected.size()}}},
                                {"inputs", inputs},
                                {"outputs", outputs},
                                {"started_at", started},
                                {"finished_at", utc_now()}};
    write_text_file(at(out.manifest), manifest.dump(2) + "\n");
  });
  return out;
}

std::vector<std::string> verify_manifest(const std::filesystem::path& manifest_path) {
  const auto j = nlohmann::json::parse(read_text_file(manifest_path));
  std::vector<std::string> bad;
  for (const auto& [name, digest] : j.at("outputs").items()) {
    const auto p = manifest_path.parent_path() / name;
    if (!std::filesystem::exists(p) || sha256_file(p) != digest.get<std::string>()) bad.push_back(name);
  }
  return bad;
}

}  // namespace numforge
