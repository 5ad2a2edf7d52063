#pragma once

#include "numforge/corpus.hpp"
#include "numforge/extractor.hpp"
#include "numforge/instructions.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace numforge {

// JSON Lines serialization of pipeline artifacts. Every writer is
// deterministic: same values, same bytes.

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// Manifest: {"documents": [{"file", "doc_id", "subject"}, ...]}; file paths
/// resolve against the manifest's directory. Throws InputError naming any
/// missing file, duplicate doc_id or empty text.
std::vector<RawDocument> load_raw_corpus(const std::filesystem::path& manifest);
std::vector<std::filesystem::path> raw_corpus_files(const std::filesystem::path& manifest);

/// One row per paragraph: {doc_id, subject, index, text}.
std::string corpus_to_jsonl(const std::vector<CleanDocument>& docs);
std::vector<CleanDocument> corpus_from_jsonl(std::string_view contents);

std::string stats_to_json(const CorpusStats& stats, std::string_view tokenizer_name);

/// {instance_id, doc_id, paragraph_span: [first, last], text,
///  numerics: [{nv_id, span: [begin, end], surface, kind, value, structural}]}
/// Spans are UTF-8 byte offsets into `text`.
std::string instances_to_jsonl(const std::vector<Instance>& instances);
std::vector<Instance> instances_from_jsonl(std::string_view contents);

/// {pair_id, instruction, output, answer_identifier, identifiers[], choices[],
///  question, provenance{instance_id, nv_id, seed},
///  metadata{precision_escalated, zero_widened}}
std::string instructions_to_jsonl(const std::vector<Instruction>& instructions);

/// {pair_id, tokens[], labels[], window_k}; labels use kIgnoreLabel (-100).
std::string training_to_jsonl(const std::vector<Instruction>& instructions,
                              const std::vector<TrainingExample>& examples);

}  // namespace numforge
