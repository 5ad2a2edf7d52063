#pragma once

#include "numforge/instructions.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace numforge {

enum class Subdomain { kAccounting, kCertificate, kEconomy, kFinance };

inline constexpr std::array<Subdomain, 4> kAllSubdomains = {
    Subdomain::kAccounting, Subdomain::kCertificate, Subdomain::kEconomy, Subdomain::kFinance};

std::string_view to_string(Subdomain d);
/// Case-insensitive.
Subdomain subdomain_from_string(std::string_view s);

enum class QuestionClass { kNumeric, kNonNumeric };

std::string_view to_string(QuestionClass c);

struct EvalQuestion {
  std::string qid;
  std::string subject;
  Subdomain subdomain = Subdomain::kFinance;
  std::string stem;
  std::vector<std::string> options;
  std::string gold;
};

/// Numeric iff any option contains a number; structural flags and the stem
/// are ignored.
QuestionClass classify_question(const EvalQuestion& q);

/// First k exemplars, each rendered through the template and followed by its
/// gold identifier, then the target question without an answer. Blocks are
/// separated by a blank line. Throws InsufficientExemplars.
std::string assemble_few_shot(const EvalQuestion& target, const std::vector<EvalQuestion>& exemplars,
                              std::size_t k_shots, const PromptTemplate& prompt = {},
                              const std::vector<std::string>& identifiers = default_identifiers(4));

/// Identifier at the argmax; ties go to the lowest index.
std::string pick_answer(const std::vector<double>& scores, const std::vector<std::string>& identifiers);

struct GroupScore {
  std::size_t n_count = 0;
  std::size_t non_n_count = 0;
  std::size_t n_correct = 0;
  std::size_t non_n_correct = 0;

  std::size_t total() const { return n_count + non_n_count; }
  /// Percentages; nullopt for an empty class.
  std::optional<double> n_acc() const;
  std::optional<double> non_n_acc() const;
  /// Pooled over both classes.
  std::optional<double> avg_acc() const;
};

struct ScoreReport {
  std::map<Subdomain, GroupScore> per_subdomain;
  GroupScore overall;

  /// Sub-domain columns (n / non-n / avg each), then Overall.
  std::string to_table() const;
  std::string to_json() const;
};

/// Throws MissingPrediction for any question without a prediction.
ScoreReport score(const std::vector<EvalQuestion>& questions,
                  const std::map<std::string, std::string>& predictions);

// Loading. JSONL rows: {qid, subject, subdomain, stem, options[], gold}.
// CSV header: qid,subject,subdomain,stem,<one column per identifier>,gold.
std::vector<EvalQuestion> load_questions(const std::filesystem::path& path,
                                         const std::vector<std::string>& identifiers = default_identifiers(4));
std::vector<EvalQuestion> parse_questions_jsonl(std::string_view contents);
std::vector<EvalQuestion> parse_questions_csv(std::string_view contents,
                                              const std::vector<std::string>& identifiers = default_identifiers(4));

/// Rows {qid, identifier} or {qid, scores[]} (scores resolved by pick_answer).
std::map<std::string, std::string> parse_predictions_jsonl(
    std::string_view contents, const std::vector<std::string>& identifiers = default_identifiers(4));

/// Minimal RFC 4180 reader: quoted fields, doubled quotes, embedded newlines.
std::vector<std::vector<std::string>> parse_csv(std::string_view contents);

}  // namespace numforge
