#include "numforge/corpus.hpp"

#include "numforge/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace numforge {

RuleSet::RuleSet(const std::vector<std::string>& patterns) : patterns_(patterns) {
  rules_.reserve(patterns.size());
  for (const auto& p : patterns) {
    try {
      rules_.emplace_back(p, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error& e) {
      throw ConfigError("invalid rule pattern '" + p + "': " + e.what());
    }
  }
}

bool RuleSet::matches(std::string_view paragraph) const {
  const std::string_view trimmed = trim(paragraph);
  for (const auto& re : rules_) {
    if (std::regex_search(trimmed.begin(), trimmed.end(), re)) return true;
  }
  return false;
}

PreprocessRules PreprocessRules::parse(std::string_view contents) {
  std::vector<std::string> filter;
  std::vector<std::string> refine;
  std::vector<std::string>* current = nullptr;
  std::istringstream in{std::string(contents)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t == "[filter]") {
      current = &filter;
    } else if (t == "[refine]") {
      current = &refine;
    } else if (t.front() == '[') {
      throw ConfigError("rule file line " + std::to_string(line_no) + ": unknown section " +
                        std::string(t));
    } else if (current == nullptr) {
      throw ConfigError("rule file line " + std::to_string(line_no) +
                        ": pattern outside [filter]/[refine] section");
    } else {
      current->emplace_back(t);
    }
  }
  return PreprocessRules{RuleSet(filter), RuleSet(refine)};
}

PreprocessRules PreprocessRules::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open rule file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::vector<std::string> split_paragraphs(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  bool has_content = false;
  auto flush = [&] {
    if (has_content) {
      const std::string_view t = trim(current);
      if (!t.empty()) out.emplace_back(t);
    }
    current.clear();
    has_content = false;
  };
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    if (trim(line).empty()) {
      flush();
    } else {
      if (has_content) current.push_back('\n');
      current.append(line);
      has_content = true;
    }
    pos = nl + 1;
  }
  flush();
  return out;
}

namespace {

RawDocument remove_matching(const RawDocument& doc, const RuleSet& rules) {
  const auto paragraphs = split_paragraphs(doc.text);
  std::vector<const std::string*> kept;
  for (const auto& p : paragraphs) {
    if (!rules.matches(p)) kept.push_back(&p);
  }
  if (kept.size() == paragraphs.size()) return doc;
  if (kept.empty()) throw DocumentEmptied(doc.doc_id);
  RawDocument out{doc.doc_id, doc.subject, {}};
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i) out.text += "\n\n";
    out.text += *kept[i];
  }
  return out;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ascii_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

}  // namespace

RawDocument filter_document(const RawDocument& doc, const RuleSet& rules) {
  return remove_matching(doc, rules);
}

RawDocument refine_document(const RawDocument& doc, const RuleSet& rules) {
  return remove_matching(doc, rules);
}

RawDocument calibrate_numerics(const RawDocument& doc, const CalibrationOptions& opts) {
  const std::string& s = doc.text;
  const std::size_t n = s.size();
  RawDocument out{doc.doc_id, doc.subject, {}};
  out.text.reserve(n);
  std::size_t i = 0;
  while (i < n) {
    if (!is_ascii_ws(s[i])) {
      out.text.push_back(s[i++]);
      continue;
    }
    std::size_t j = i;
    bool has_newline = false;
    while (j < n && is_ascii_ws(s[j])) {
      has_newline = has_newline || s[j] == '\n';
      ++j;
    }
    bool join = false;
    if (i > 0 && j < n) {
      const char prev = s[i - 1];
      const char next = s[j];
      const bool left_ok = is_digit(prev) || (prev == '.' && i >= 2 && is_digit(s[i - 2]));
      const bool right_ok = is_digit(next) || (next == '.' && j + 1 < n && is_digit(s[j + 1]));
      const bool single_space = (j - i == 1 && s[i] == ' ');
      const bool is_break = has_newline && opts.rejoin_breaks;
      join = left_ok && right_ok && !(prev == '.' && next == '.') && (single_space || is_break);
    }
    if (!join) out.text.append(s, i, j - i);
    i = j;
  }
  return out;
}

CleanDocument segment_paragraphs(const RawDocument& doc) {
  auto pieces = split_paragraphs(doc.text);
  if (pieces.empty()) throw DocumentEmptied(doc.doc_id);
  CleanDocument out{doc.doc_id, doc.subject, {}};
  out.paragraphs.reserve(pieces.size());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    out.paragraphs.push_back(Paragraph{i, std::move(pieces[i])});
  }
  return out;
}

CleanDocument preprocess_document(const RawDocument& doc, const PreprocessRules& rules,
                                  const CalibrationOptions& opts) {
  return segment_paragraphs(
      calibrate_numerics(refine_document(filter_document(doc, rules.filter), rules.refine), opts));
}

CorpusStats corpus_stats(const std::vector<CleanDocument>& docs, const Tokenizer& tokenizer) {
  CorpusStats stats;
  std::set<std::string> subjects;
  for (const auto& d : docs) {
    subjects.insert(d.subject);
    for (const auto& p : d.paragraphs) stats.num_tokens += tokenizer.count(p.text);
  }
  stats.num_subjects = subjects.size();
  stats.num_documents = docs.size();
  return stats;
}

std::string join_paragraphs(const CleanDocument& doc) {
  std::string out;
  for (const auto& p : doc.paragraphs) {
    if (!out.empty()) out += "\n\n";
    out += p.text;
  }
  return out;
}

}  // namespace numforge
