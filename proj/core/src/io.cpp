#include "numforge/io.hpp"

#include "numforge/error.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace numforge {

using ordered_json = nlohmann::ordered_json;

namespace {

template <class Fn>
void for_each_row(std::string_view contents, std::string_view what, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    std::size_t nl = contents.find('\n', pos);
    if (nl == std::string_view::npos) nl = contents.size();
    ++line_no;
    const std::string_view line = contents.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      fn(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string(what) + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::string dump_line(const ordered_json& j) { return j.dump() + "\n"; }

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

namespace {

struct ManifestEntry {
  std::filesystem::path file;
  std::string doc_id;
  std::string subject;
};

std::vector<ManifestEntry> parse_manifest(const std::filesystem::path& manifest) {
  const std::string contents = read_text_file(manifest);
  std::vector<ManifestEntry> out;
  std::set<std::string> ids;
  try {
    const auto j = nlohmann::json::parse(contents);
    for (const auto& d : j.at("documents")) {
      ManifestEntry e;
      e.file = manifest.parent_path() / d.at("file").get<std::string>();
      e.doc_id = d.at("doc_id").get<std::string>();
      e.subject = d.at("subject").get<std::string>();
      if (e.doc_id.empty()) throw InputError(manifest.string() + ": empty doc_id");
      if (!ids.insert(e.doc_id).second) {
        throw InputError(manifest.string() + ": duplicate doc_id '" + e.doc_id + "'");
      }
      out.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(manifest.string() + ": " + e.what());
  }
  return out;
}

}  // namespace

std::vector<std::filesystem::path> raw_corpus_files(const std::filesystem::path& manifest) {
  std::vector<std::filesystem::path> out;
  for (auto& e : parse_manifest(manifest)) out.push_back(std::move(e.file));
  return out;
}

std::vector<RawDocument> load_raw_corpus(const std::filesystem::path& manifest) {
  std::vector<RawDocument> docs;
  for (auto& e : parse_manifest(manifest)) {
    if (!std::filesystem::exists(e.file)) throw InputError("missing input file: " + e.file.string());
    RawDocument doc{e.doc_id, e.subject, read_text_file(e.file)};
    if (doc.text.empty()) throw InputError("empty document: " + e.file.string());
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::string corpus_to_jsonl(const std::vector<CleanDocument>& docs) {
  std::string out;
  for (const auto& d : docs) {
    for (const auto& p : d.paragraphs) {
      out += dump_line(ordered_json{
          {"doc_id", d.doc_id}, {"subject", d.subject}, {"index", p.index}, {"text", p.text}});
    }
  }
  return out;
}

std::vector<CleanDocument> corpus_from_jsonl(std::string_view contents) {
  std::vector<CleanDocument> docs;
  std::set<std::string> closed;
  for_each_row(contents, "corpus", [&](const nlohmann::json& row) {
    const auto doc_id = row.at("doc_id").get<std::string>();
    if (docs.empty() || docs.back().doc_id != doc_id) {
      if (!closed.insert(doc_id).second) {
        throw InputError("corpus: paragraphs of '" + doc_id + "' are not contiguous");
      }
      docs.push_back(CleanDocument{doc_id, row.at("subject").get<std::string>(), {}});
    }
    auto& d = docs.back();
    const auto index = row.at("index").get<std::size_t>();
    if (index != d.paragraphs.size()) {
      throw InputError("corpus: '" + doc_id + "' paragraph index " + std::to_string(index) +
                       " out of sequence");
    }
    d.paragraphs.push_back(Paragraph{index, row.at("text").get<std::string>()});
  });
  return docs;
}

std::string stats_to_json(const CorpusStats& stats, std::string_view tokenizer_name) {
  return ordered_json{{"num_subjects", stats.num_subjects},
                      {"num_documents", stats.num_documents},
                      {"num_tokens", stats.num_tokens},
                      {"tokenizer", tokenizer_name}}
             .dump(2) +
         "\n";
}

std::string instances_to_jsonl(const std::vector<Instance>& instances) {
  std::string out;
  for (const auto& inst : instances) {
    ordered_json nums = ordered_json::array();
    for (const auto& nv : inst.numerics) {
      nums.push_back(ordered_json{{"nv_id", nv.nv_id},
                                  {"span", {nv.span.begin, nv.span.end}},
                                  {"surface", nv.surface},
                                  {"kind", to_string(nv.kind)},
                                  {"value", nv.value.to_string()},
                                  {"structural", nv.structural}});
    }
    out += dump_line(ordered_json{{"instance_id", inst.instance_id},
                                  {"doc_id", inst.doc_id},
                                  {"paragraph_span", {inst.first_paragraph, inst.last_paragraph}},
                                  {"text", inst.text},
                                  {"numerics", nums}});
  }
  return out;
}

std::vector<Instance> instances_from_jsonl(std::string_view contents) {
  std::vector<Instance> out;
  for_each_row(contents, "instances", [&](const nlohmann::json& row) {
    Instance inst;
    inst.instance_id = row.at("instance_id").get<std::string>();
    inst.doc_id = row.at("doc_id").get<std::string>();
    const auto& ps = row.at("paragraph_span");
    inst.first_paragraph = ps.at(0).get<std::size_t>();
    inst.last_paragraph = ps.at(1).get<std::size_t>();
    inst.text = row.at("text").get<std::string>();
    for (const auto& n : row.at("numerics")) {
      NumericVariable nv;
      nv.nv_id = n.at("nv_id").get<std::string>();
      nv.span = Span{n.at("span").at(0).get<std::size_t>(), n.at("span").at(1).get<std::size_t>()};
      nv.surface = n.at("surface").get<std::string>();
      nv.kind = numeric_kind_from_string(n.at("kind").get<std::string>());
      nv.value = Decimal::parse(n.at("value").get<std::string>());
      nv.structural = n.at("structural").get<bool>();
      if (nv.span.end > inst.text.size() || nv.span.begin > nv.span.end ||
          inst.text.compare(nv.span.begin, nv.span.size(), nv.surface) != 0) {
        throw StaleSpan("instance " + inst.instance_id + ": " + nv.nv_id + " span does not match '" +
                        nv.surface + "'");
      }
      inst.numerics.push_back(std::move(nv));
    }
    out.push_back(std::move(inst));
  });
  return out;
}

std::string instructions_to_jsonl(const std::vector<Instruction>& instructions) {
  std::string out;
  for (const auto& ins : instructions) {
    out += dump_line(ordered_json{
        {"pair_id", ins.pair_id},
        {"instruction", ins.pair.instruction},
        {"output", ins.pair.output},
        {"answer_identifier", ins.answer_identifier},
        {"identifiers", ins.identifiers},
        {"choices", ins.choice_texts},
        {"question", ins.question},
        {"provenance",
         {{"instance_id", ins.provenance.instance_id},
          {"nv_id", ins.provenance.nv_id},
          {"seed", ins.provenance.seed}}},
        {"metadata",
         {{"precision_escalated", ins.precision_escalated}, {"zero_widened", ins.zero_widened}}}});
  }
  return out;
}

std::string training_to_jsonl(const std::vector<Instruction>& instructions,
                              const std::vector<TrainingExample>& examples) {
  if (instructions.size() != examples.size()) {
    throw InputError("training export: instruction/example count mismatch");
  }
  std::string out;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    out += dump_line(ordered_json{{"pair_id", instructions[i].pair_id},
                                  {"tokens", examples[i].tokens},
                                  {"labels", examples[i].labels},
                                  {"window_k", examples[i].window_k}});
  }
  return out;
}

}  // namespace numforge
