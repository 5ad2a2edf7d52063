#pragma once

#include "numforge/text.hpp"

#include <cstddef>
#include <filesystem>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace numforge {

struct RawDocument {
  std::string doc_id;
  std::string subject;
  std::string text;
};

struct Paragraph {
  std::size_t index = 0;
  std::string text;
};

struct CleanDocument {
  std::string doc_id;
  std::string subject;
  std::vector<Paragraph> paragraphs;
};

struct CorpusStats {
  std::size_t num_subjects = 0;
  std::size_t num_documents = 0;
  std::size_t num_tokens = 0;
};

/// Ordered paragraph predicates. A paragraph matching any pattern is removed.
class RuleSet {
 public:
  RuleSet() = default;
  explicit RuleSet(const std::vector<std::string>& patterns);

  bool matches(std::string_view paragraph) const;
  bool empty() const { return rules_.empty(); }
  const std::vector<std::string>& patterns() const { return patterns_; }

 private:
  std::vector<std::string> patterns_;
  std::vector<std::regex> rules_;
};

/// Filter and refinement rule sets as loaded from one rule file.
///
/// File format: `[filter]` and `[refine]` section headers, one ECMAScript
/// regular expression per line, `#` starts a comment line. Patterns are
/// searched (not anchored) within the trimmed paragraph.
struct PreprocessRules {
  RuleSet filter;
  RuleSet refine;

  static PreprocessRules parse(std::string_view contents);
  static PreprocessRules load(const std::filesystem::path& path);
};

struct CalibrationOptions {
  bool rejoin_breaks = true;
};

/// Removes every blank-line-delimited paragraph that matches a rule.
/// Unchanged text when nothing matches; otherwise kept paragraphs are joined
/// by one blank line. Throws DocumentEmptied if nothing is left.
RawDocument filter_document(const RawDocument& doc, const RuleSet& rules);

/// Same mechanics as filter_document, applied with the refinement rules.
RawDocument refine_document(const RawDocument& doc, const RuleSet& rules);

/// Rejoins numbers broken by a single space ("3. 5" -> "3.5", "12 34" ->
/// "1234") or, when enabled, by a line/paragraph break between a trailing
/// digit and a leading digit or decimal point. Only whitespace is removed.
RawDocument calibrate_numerics(const RawDocument& doc, const CalibrationOptions& opts = {});

/// Splits on blank lines, trims, drops empty pieces. Throws DocumentEmptied
/// when no paragraph survives.
CleanDocument segment_paragraphs(const RawDocument& doc);

/// filter -> refine -> calibrate -> segment.
CleanDocument preprocess_document(const RawDocument& doc, const PreprocessRules& rules,
                                  const CalibrationOptions& opts = {});

CorpusStats corpus_stats(const std::vector<CleanDocument>& docs, const Tokenizer& tokenizer);

/// Blank-line paragraph split of raw text, trimmed, empties dropped.
std::vector<std::string> split_paragraphs(std::string_view text);

/// Joins paragraph texts with "\n\n".
std::string join_paragraphs(const CleanDocument& doc);

}  // namespace numforge
