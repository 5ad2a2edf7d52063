#pragma once

#include "numforge/choicegen.hpp"
#include "numforge/config.hpp"
#include "numforge/extractor.hpp"
#include "numforge/rng.hpp"
#include "numforge/text.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace numforge {

/// Replaces a masked number in the question. Four characters, four tokens
/// under DefaultTokenizer.
inline constexpr std::string_view kBlank = "____";

/// Label value for positions that carry no loss. Token ids are never negative.
inline constexpr std::int32_t kIgnoreLabel = -100;

/// Prompt layout with `{question}`, `{choices}` (all choice lines joined by
/// "\n") and `{F_1}`..`{F_n}` (individual choice lines) placeholders.
class PromptTemplate {
 public:
  PromptTemplate();
  explicit PromptTemplate(std::string text);

  static PromptTemplate load(const std::filesystem::path& path);

  /// Fills the placeholders. `choice_lines` are already rendered "A. 3.5" lines.
  std::string render(std::string_view question, const std::vector<std::string>& choice_lines) const;

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

/// "A".."Z" truncated to n. Throws ConfigError for n > 26.
std::vector<std::string> default_identifiers(std::size_t n);

/// Identifier ⊕ ". " ⊕ choice text.
std::string render_choice_line(std::string_view identifier, std::string_view choice);

struct InstructionPair {
  std::string instruction;
  std::string output;
};

struct Provenance {
  std::string instance_id;
  std::string nv_id;
  std::uint64_t seed = 0;
};

struct Instruction {
  std::string pair_id;
  std::string question;
  std::vector<std::string> identifiers;
  std::vector<Decimal> choices;
  std::vector<std::string> choice_texts;  // correct slot holds the surface form verbatim
  std::size_t answer_index = 0;
  std::string answer_identifier;
  Provenance provenance;
  bool precision_escalated = false;
  bool zero_widened = false;
  InstructionPair pair;
};

struct BuildOptions {
  std::vector<std::string> identifiers = default_identifiers(4);
  PromptTemplate prompt;
  unsigned jobs = 1;
};

/// inst.text with nv's span replaced by kBlank. Throws StaleSpan when the
/// span no longer holds nv's surface form.
std::string mask_variable(const Instance& inst, const NumericVariable& nv);

/// Draws the answer slot uniformly, fills the remaining slots with the
/// distractors in generated order and renders the prompt.
Instruction build_instruction(const Instance& inst, const NumericVariable& nv,
                              const ChoiceSet& choices, const PipelineConfig& cfg,
                              const BuildOptions& opts, SeededRng& rng);

/// Every selected variable of every instance; each instance consumes its own
/// stream SeededRng::derive(cfg.seed, instance_id), so output does not depend
/// on opts.jobs.
std::vector<Instruction> build_dataset(const std::vector<Instance>& instances,
                                       const PipelineConfig& cfg, const BuildOptions& opts);

/// Tokenized instruction ⊕ output with loss labels on the output only.
struct TrainingExample {
  std::vector<std::int32_t> tokens;
  std::vector<std::int32_t> labels;
  std::size_t instruction_length = 0;
  std::size_t window_k = 1;

  std::size_t output_length() const { return tokens.size() - instruction_length; }

  /// Token ids conditioning output position i (1-based): with l the
  /// instruction length, w_{l+i-k}..w_l then o_1..o_{i-1} when i <= k, and
  /// o_{i-k}..o_{i-1} when i > k. Clipped at the sequence start.
  std::vector<std::int32_t> conditioning_window(std::size_t i) const;
};

TrainingExample make_training_example(const InstructionPair& pair, const Tokenizer& tokenizer,
                                      std::size_t window_k);

}  // namespace numforge
