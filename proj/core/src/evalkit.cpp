#include "numforge/evalkit.hpp"

#include "numforge/error.hpp"
#include "numforge/numeric_lex.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace numforge {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Subdomain d) {
  switch (d) {
    case Subdomain::kAccounting:
      return "Accounting";
    case Subdomain::kCertificate:
      return "Certificate";
    case Subdomain::kEconomy:
      return "Economy";
    case Subdomain::kFinance:
      return "Finance";
  }
  return "?";
}

Subdomain subdomain_from_string(std::string_view s) {
  std::string lower;
  for (char c : s) lower.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
  if (lower == "accounting") return Subdomain::kAccounting;
  if (lower == "certificate") return Subdomain::kCertificate;
  if (lower == "economy") return Subdomain::kEconomy;
  if (lower == "finance") return Subdomain::kFinance;
  throw InputError("unknown subdomain '" + std::string(s) + "'");
}

std::string_view to_string(QuestionClass c) {
  return c == QuestionClass::kNumeric ? "numeric" : "non_numeric";
}

QuestionClass classify_question(const EvalQuestion& q) {
  for (const auto& opt : q.options) {
    if (!lex_numerics(opt).empty()) return QuestionClass::kNumeric;
  }
  return QuestionClass::kNonNumeric;
}

namespace {

std::string render_question(const EvalQuestion& q, const PromptTemplate& prompt,
                            const std::vector<std::string>& identifiers) {
  if (q.options.size() != identifiers.size()) {
    throw InputError("question " + q.qid + " has " + std::to_string(q.options.size()) +
                     " options for " + std::to_string(identifiers.size()) + " identifiers");
  }
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < q.options.size(); ++i) {
    lines.push_back(render_choice_line(identifiers[i], q.options[i]));
  }
  return prompt.render(q.stem, lines);
}

std::optional<double> percent(std::size_t correct, std::size_t total) {
  if (total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

ordered_json group_json(const GroupScore& g) {
  auto opt = [](std::optional<double> v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  return ordered_json{{"n_acc", opt(g.n_acc())},         {"non_n_acc", opt(g.non_n_acc())},
                      {"avg_acc", opt(g.avg_acc())},     {"n_count", g.n_count},
                      {"non_n_count", g.non_n_count},    {"n_correct", g.n_correct},
                      {"non_n_correct", g.non_n_correct}};
}

void validate_question(const EvalQuestion& q, const std::vector<std::string>& identifiers) {
  if (q.qid.empty()) throw InputError("question without qid");
  if (q.options.size() != identifiers.size()) {
    throw InputError("question " + q.qid + ": expected " + std::to_string(identifiers.size()) +
                     " options, got " + std::to_string(q.options.size()));
  }
  if (std::find(identifiers.begin(), identifiers.end(), q.gold) == identifiers.end()) {
    throw InputError("question " + q.qid + ": gold '" + q.gold + "' is not an identifier");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class Fn>
void for_each_jsonl(std::string_view contents, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    std::size_t nl = contents.find('\n', pos);
    if (nl == std::string_view::npos) nl = contents.size();
    ++line_no;
    const std::string_view line = contents.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
      fn(row);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("JSONL line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace

std::string assemble_few_shot(const EvalQuestion& target, const std::vector<EvalQuestion>& exemplars,
                              std::size_t k_shots, const PromptTemplate& prompt,
                              const std::vector<std::string>& identifiers) {
  if (exemplars.size() < k_shots) {
    throw InsufficientExemplars("need " + std::to_string(k_shots) + " exemplars, have " +
                                std::to_string(exemplars.size()));
  }
  std::string out;
  for (std::size_t i = 0; i < k_shots; ++i) {
    out += render_question(exemplars[i], prompt, identifiers);
    out += exemplars[i].gold;
    out += "\n\n";
  }
  out += render_question(target, prompt, identifiers);
  return out;
}

std::string pick_answer(const std::vector<double>& scores, const std::vector<std::string>& identifiers) {
  if (scores.empty() || identifiers.empty()) throw InputError("pick_answer: empty scores or identifiers");
  if (scores.size() != identifiers.size()) {
    throw InputError("pick_answer: " + std::to_string(scores.size()) + " scores for " +
                     std::to_string(identifiers.size()) + " identifiers");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return identifiers[best];
}

std::optional<double> GroupScore::n_acc() const { return percent(n_correct, n_count); }
std::optional<double> GroupScore::non_n_acc() const { return percent(non_n_correct, non_n_count); }
std::optional<double> GroupScore::avg_acc() const {
  return percent(n_correct + non_n_correct, n_count + non_n_count);
}

ScoreReport score(const std::vector<EvalQuestion>& questions,
                  const std::map<std::string, std::string>& predictions) {
  ScoreReport report;
  for (Subdomain d : kAllSubdomains) report.per_subdomain[d];
  for (const auto& q : questions) {
    auto it = predictions.find(q.qid);
    if (it == predictions.end()) throw MissingPrediction(q.qid);
    const bool correct = it->second == q.gold;
    const bool numeric = classify_question(q) == QuestionClass::kNumeric;
    for (GroupScore* g : {&report.per_subdomain[q.subdomain], &report.overall}) {
      if (numeric) {
        ++g->n_count;
        g->n_correct += correct;
      } else {
        ++g->non_n_count;
        g->non_n_correct += correct;
      }
    }
  }
  return report;
}

std::string ScoreReport::to_table() const {
  constexpr int kCell = 8;
  auto cell = [](const std::string& s) {
    std::string out = s;
    if (out.size() < kCell) out.insert(0, kCell - out.size(), ' ');
    return out;
  };
  auto acc = [&](std::optional<double> v) {
    if (!v) return cell("-");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *v);
    return cell(buf);
  };
  std::vector<std::pair<std::string, const GroupScore*>> groups;
  for (Subdomain d : kAllSubdomains) groups.emplace_back(std::string(to_string(d)), &per_subdomain.at(d));
  groups.emplace_back("Overall", &overall);

  const std::string label_pad(12, ' ');
  std::string head1 = label_pad;
  std::string head2 = "            ";
  std::string counts = "#questions  ";
  std::string accs = "accuracy(%) ";
  for (const auto& [name, g] : groups) {
    std::string title = name;
    const std::size_t width = 3 * kCell;
    if (title.size() < width) title.insert(0, width - title.size(), ' ');
    head1 += " |" + title;
    head2 += " |" + cell("n") + cell("non-n") + cell("avg");
    counts += " |" + cell(std::to_string(g->n_count)) + cell(std::to_string(g->non_n_count)) +
              cell(std::to_string(g->total()));
    accs += " |" + acc(g->n_acc()) + acc(g->non_n_acc()) + acc(g->avg_acc());
  }
  return head1 + "\n" + head2 + "\n" + counts + "\n" + accs + "\n";
}

std::string ScoreReport::to_json() const {
  ordered_json j;
  j["columns"] = {"n", "non-n", "avg"};
  ordered_json per = ordered_json::object();
  for (Subdomain d : kAllSubdomains) per[std::string(to_string(d))] = group_json(per_subdomain.at(d));
  j["per_subdomain"] = per;
  j["overall"] = group_json(overall);
  return j.dump(2) + "\n";
}

std::vector<EvalQuestion> parse_questions_jsonl(std::string_view contents) {
  std::vector<EvalQuestion> out;
  for_each_jsonl(contents, [&](const nlohmann::json& row) {
    EvalQuestion q;
    q.qid = row.at("qid").get<std::string>();
    q.subject = row.value("subject", std::string());
    q.subdomain = subdomain_from_string(row.at("subdomain").get<std::string>());
    q.stem = row.at("stem").get<std::string>();
    q.options = row.at("options").get<std::vector<std::string>>();
    q.gold = row.at("gold").get<std::string>();
    out.push_back(std::move(q));
  });
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view contents) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  for (std::size_t i = 0; i < contents.size(); ++i) {
    const char c = contents[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < contents.size() && contents[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < contents.size() && contents[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      field.clear();
      row.clear();
      any = false;
    } else {
      field.push_back(c);
      any = true;
    }
  }
  if (in_quotes) throw InputError("CSV: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  // Strip a UTF-8 byte order mark from the first header cell.
  if (!rows.empty() && !rows[0].empty() && rows[0][0].rfind("\xEF\xBB\xBF", 0) == 0) {
    rows[0][0].erase(0, 3);
  }
  return rows;
}

std::vector<EvalQuestion> parse_questions_csv(std::string_view contents,
                                              const std::vector<std::string>& identifiers) {
  const auto rows = parse_csv(contents);
  if (rows.empty()) throw InputError("CSV: missing header");
  const auto& header = rows.front();
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InputError("CSV: missing required column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_qid = column("qid");
  const std::size_t c_subject = column("subject");
  const std::size_t c_subdomain = column("subdomain");
  const std::size_t c_stem = column("stem");
  const std::size_t c_gold = column("gold");
  std::vector<std::size_t> c_opts;
  for (const auto& id : identifiers) c_opts.push_back(column(id));

  std::vector<EvalQuestion> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw InputError("CSV row " + std::to_string(r + 1) + ": " + std::to_string(row.size()) +
                       " fields, header has " + std::to_string(header.size()));
    }
    EvalQuestion q;
    q.qid = row[c_qid];
    q.subject = row[c_subject];
    q.subdomain = subdomain_from_string(row[c_subdomain]);
    q.stem = row[c_stem];
    for (std::size_t c : c_opts) q.options.push_back(row[c]);
    q.gold = row[c_gold];
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<EvalQuestion> load_questions(const std::filesystem::path& path,
                                         const std::vector<std::string>& identifiers) {
  const std::string contents = read_file(path);
  auto qs = path.extension() == ".csv" ? parse_questions_csv(contents, identifiers)
                                       : parse_questions_jsonl(contents);
  for (const auto& q : qs) validate_question(q, identifiers);
  return qs;
}

std::map<std::string, std::string> parse_predictions_jsonl(std::string_view contents,
                                                           const std::vector<std::string>& identifiers) {
  std::map<std::string, std::string> out;
  for_each_jsonl(contents, [&](const nlohmann::json& row) {
    const auto qid = row.at("qid").get<std::string>();
    std::string pick;
    if (row.contains("identifier")) {
      pick = row.at("identifier").get<std::string>();
    } else {
      pick = pick_answer(row.at("scores").get<std::vector<double>>(), identifiers);
    }
    out[qid] = std::move(pick);
  });
  return out;
}

}  // namespace numforge
