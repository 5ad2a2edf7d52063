#include "numforge/instructions.hpp"

#include "numforge/error.hpp"
#include "numforge/parallel.hpp"

#include <fstream>
#include <sstream>

namespace numforge {

namespace {

constexpr std::string_view kDefaultTemplate =
    "以下是关于金融知识的单项选择题，请选出其中的正确答案。\n"
    "{question}\n"
    "{choices}\n"
    "答案：";

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  if (from.empty()) return;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

PromptTemplate::PromptTemplate() : text_(kDefaultTemplate) {}

PromptTemplate::PromptTemplate(std::string text) : text_(std::move(text)) {
  if (text_.find("{question}") == std::string::npos) {
    throw ConfigError("prompt template lacks a {question} placeholder");
  }
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open prompt template: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return PromptTemplate(std::move(text));
}

std::string PromptTemplate::render(std::string_view question,
                                   const std::vector<std::string>& choice_lines) const {
  // Placeholders become \x01<index>\x01 markers first; values are spliced in
  // afterwards and never rescanned.
  std::string joined;
  for (std::size_t i = 0; i < choice_lines.size(); ++i) {
    if (i) joined.push_back('\n');
    joined += choice_lines[i];
  }
  std::vector<std::string> values{std::string(question), joined};
  std::string out = text_;
  replace_all(out, "{question}", "\x01" "0\x01");
  replace_all(out, "{choices}", "\x01" "1\x01");
  for (std::size_t i = 0; i < choice_lines.size(); ++i) {
    replace_all(out, "{F_" + std::to_string(i + 1) + "}", "\x01" + std::to_string(i + 2) + "\x01");
    values.push_back(choice_lines[i]);
  }
  std::string result;
  result.reserve(out.size() + question.size() + joined.size() * 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] != '\x01') {
      result.push_back(out[i]);
      continue;
    }
    const std::size_t close = out.find('\x01', i + 1);
    result += values[std::stoul(out.substr(i + 1, close - i - 1))];
    i = close;
  }
  return result;
}

std::vector<std::string> default_identifiers(std::size_t n) {
  if (n > 26) throw ConfigError("default identifiers only cover up to 26 choices");
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.emplace_back(1, static_cast<char>('A' + i));
  return ids;
}

std::string render_choice_line(std::string_view identifier, std::string_view choice) {
  std::string line(identifier);
  line += ". ";
  line += choice;
  return line;
}

std::string mask_variable(const Instance& inst, const NumericVariable& nv) {
  if (nv.span.end > inst.text.size() || nv.span.begin > nv.span.end ||
      std::string_view(inst.text).substr(nv.span.begin, nv.span.size()) != nv.surface) {
    throw StaleSpan("span [" + std::to_string(nv.span.begin) + ", " + std::to_string(nv.span.end) +
                    ") of " + nv.nv_id + " does not hold '" + nv.surface + "' in " + inst.instance_id);
  }
  std::string out = inst.text.substr(0, nv.span.begin);
  out += kBlank;
  out += std::string_view(inst.text).substr(nv.span.end);
  return out;
}

Instruction build_instruction(const Instance& inst, const NumericVariable& nv,
                              const ChoiceSet& choices, const PipelineConfig& cfg,
                              const BuildOptions& opts, SeededRng& rng) {
  if (choices.nv_ref != nv.nv_id) {
    throw InputError("choice set for " + choices.nv_ref + " used with " + nv.nv_id);
  }
  if (opts.identifiers.size() != cfg.n_cho) {
    throw ConfigError("need " + std::to_string(cfg.n_cho) + " identifiers, got " +
                      std::to_string(opts.identifiers.size()));
  }
  if (choices.distractors.size() + 1 != cfg.n_cho) {
    throw InputError("choice set for " + nv.nv_id + " has " +
                     std::to_string(choices.distractors.size()) + " distractors, expected " +
                     std::to_string(cfg.n_cho - 1));
  }
  Instruction out;
  out.pair_id = inst.instance_id + "/" + nv.nv_id;
  out.question = mask_variable(inst, nv);
  out.identifiers = opts.identifiers;
  out.answer_index = static_cast<std::size_t>(rng.uniform_below(cfg.n_cho));
  out.answer_identifier = opts.identifiers[out.answer_index];
  out.provenance = Provenance{inst.instance_id, nv.nv_id, cfg.seed};
  out.precision_escalated = choices.precision_escalated;
  out.zero_widened = choices.zero_widened;

  std::size_t next_distractor = 0;
  std::vector<std::string> lines;
  for (std::size_t k = 0; k < cfg.n_cho; ++k) {
    if (k == out.answer_index) {
      out.choices.push_back(choices.correct_value);
      out.choice_texts.push_back(nv.surface);
    } else {
      const Decimal& d = choices.distractors[next_distractor++];
      out.choices.push_back(d);
      out.choice_texts.push_back(d.to_string());
    }
    lines.push_back(render_choice_line(out.identifiers[k], out.choice_texts.back()));
  }
  out.pair.instruction = opts.prompt.render(out.question, lines);
  out.pair.output = out.answer_identifier;
  return out;
}

std::vector<Instruction> build_dataset(const std::vector<Instance>& instances,
                                       const PipelineConfig& cfg, const BuildOptions& opts) {
  std::vector<std::vector<Instruction>> per_instance(instances.size());
  parallel_for(instances.size(), opts.jobs, [&](std::size_t t) {
    const Instance& inst = instances[t];
    SeededRng rng = SeededRng::derive(cfg.seed, inst.instance_id);
    for (const auto& nv : select_variables(inst, cfg, rng)) {
      const ChoiceSet cs = make_choice_set(nv, cfg, rng);
      per_instance[t].push_back(build_instruction(inst, nv, cs, cfg, opts, rng));
    }
  });
  std::vector<Instruction> out;
  for (auto& group : per_instance) {
    for (auto& ins : group) out.push_back(std::move(ins));
  }
  return out;
}

std::vector<std::int32_t> TrainingExample::conditioning_window(std::size_t i) const {
  const std::size_t out_len = output_length();
  if (i < 1 || i > out_len) throw std::out_of_range("conditioning_window: output position out of range");
  const std::size_t k = window_k;
  // Absolute index (0-based) of o_i is instruction_length + i - 1; the window
  // is the k tokens before it, clipped at the start. When i > k this range
  // lies entirely inside the output.
  const std::size_t pos = instruction_length + i - 1;
  const std::size_t begin = pos >= k ? pos - k : 0;
  return std::vector<std::int32_t>(tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                                   tokens.begin() + static_cast<std::ptrdiff_t>(pos));
}

TrainingExample make_training_example(const InstructionPair& pair, const Tokenizer& tokenizer,
                                      std::size_t window_k) {
  if (window_k < 1) throw ConfigError("window_k must be >= 1");
  TrainingExample ex;
  ex.window_k = window_k;
  ex.tokens = tokenizer.encode(pair.instruction);
  ex.instruction_length = ex.tokens.size();
  ex.labels.assign(ex.instruction_length, kIgnoreLabel);
  for (std::int32_t id : tokenizer.encode(pair.output)) {
    ex.tokens.push_back(id);
    ex.labels.push_back(id);
  }
  return ex;
}

}  // namespace numforge
