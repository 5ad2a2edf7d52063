#include "numforge/extractor.hpp"

#include "numforge/error.hpp"
#include "numforge/text.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace numforge {

bool ends_sentence(std::string_view paragraph) {
  static constexpr std::array<char32_t, 13> kTerminals = {
      U'。', U'！', U'？', U'；', U'.', U'!', U'?', U';', U':', U'"', U'」', U'』', U'”'};
  const std::string_view t = trim(paragraph);
  if (t.empty()) return false;
  const char32_t last = utf8::decode(t, utf8::prev_start(t, t.size())).cp;
  for (char32_t c : kTerminals) {
    if (c == last) return true;
  }
  return false;
}

std::vector<Instance> extract_instances(const CleanDocument& doc, const PipelineConfig& cfg,
                                        const StructuralKeywords& keywords) {
  std::vector<Instance> out;
  const auto& paras = doc.paragraphs;
  const std::size_t count = paras.size();
  std::size_t pos = 0;
  while (pos + cfg.n_min <= count) {
    std::size_t last = pos + cfg.n_min - 1;
    while (!ends_sentence(paras[last].text) && last - pos + 1 < cfg.n_max && last + 1 < count) {
      ++last;
    }
    std::string text;
    for (std::size_t i = pos; i <= last; ++i) {
      if (i > pos) text.push_back('\n');
      text += paras[i].text;
    }
    auto numerics = legitimate_numerics(text, keywords);
    if (!numerics.empty()) {
      Instance inst;
      inst.instance_id = doc.doc_id + ":" + std::to_string(pos) + "-" + std::to_string(last);
      inst.doc_id = doc.doc_id;
      inst.first_paragraph = pos;
      inst.last_paragraph = last;
      inst.text = std::move(text);
      inst.numerics = std::move(numerics);
      out.push_back(std::move(inst));
    }
    pos = last + 1;
  }
  return out;
}

std::vector<Instance> select_instances(const std::vector<Instance>& all, const PipelineConfig& cfg,
                                       SeededRng& rng) {
  const std::size_t m = std::min(all.size(), ceil_fraction(cfg.r_ins, all.size()));
  std::vector<Instance> out;
  out.reserve(m);
  for (std::size_t i : sample_indices(all.size(), m, rng)) out.push_back(all[i]);
  return out;
}

namespace {

void check_counts(std::uint64_t n_ins, std::uint64_t n_irr, std::uint64_t n_selected) {
  if (n_irr > n_ins || n_selected > n_ins) {
    throw InvalidCounts("relevance_probability requires n_irr <= n_ins and n_selected <= n_ins (got n_ins=" +
                        std::to_string(n_ins) + ", n_irr=" + std::to_string(n_irr) +
                        ", n_selected=" + std::to_string(n_selected) + ")");
  }
}

}  // namespace

Rational relevance_probability(std::uint64_t n_ins, std::uint64_t n_irr, std::uint64_t n_selected) {
  check_counts(n_ins, n_irr, n_selected);
  const std::uint64_t relevant = n_ins - n_irr;
  if (n_selected > relevant) return Rational(0);
  BigInt num = 1;
  BigInt den = 1;
  for (std::uint64_t j = 0; j < n_selected; ++j) {
    num *= relevant - j;
    den *= n_ins - j;
  }
  return Rational(num, den);
}

double log_relevance_probability(std::uint64_t n_ins, std::uint64_t n_irr,
                                 std::uint64_t n_selected) {
  check_counts(n_ins, n_irr, n_selected);
  const std::uint64_t relevant = n_ins - n_irr;
  if (n_selected > relevant) return -std::numeric_limits<double>::infinity();
  auto lf = [](std::uint64_t x) { return std::lgamma(static_cast<double>(x) + 1.0); };
  return lf(relevant) - lf(relevant - n_selected) - lf(n_ins) + lf(n_ins - n_selected);
}

}  // namespace numforge
