#include "numforge/config.hpp"
#include "numforge/error.hpp"
#include "numforge/extractor.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace numforge {
namespace {

CleanDocument make_doc(const std::vector<std::string>& paragraphs) {
  CleanDocument doc{"doc", "s", {}};
  for (std::size_t i = 0; i < paragraphs.size(); ++i) doc.paragraphs.push_back(Paragraph{i, paragraphs[i]});
  return doc;
}

PipelineConfig config(std::size_t n_min = 3, std::size_t n_max = 8) {
  PipelineConfig cfg;
  cfg.n_min = n_min;
  cfg.n_max = n_max;
  return cfg;
}

std::vector<Instance> dummy_instances(std::size_t n) {
  std::vector<Instance> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i].instance_id = "i" + std::to_string(i);
  return out;
}

TEST(SentenceEnd, TerminalSet) {
  for (const char* s : {"结束。", "真的！", "吗？", "分号；", "end.", "wow!", "why?", "a;", "如下:", "说\"", "「引」",
                        "『引』", "“引”", "结束。  "}) {
    EXPECT_TRUE(ends_sentence(s)) << s;
  }
  for (const char* s : {"标题", "如下：", "12", "逗号，", ""}) EXPECT_FALSE(ends_sentence(s)) << s;
}

TEST(Extract, NumericFreeCandidateIsDiscarded) {
  const auto doc = make_doc({"增长3.5倍。", "第二段。", "第三段。", "没有数字。", "也没有。", "还是没有。"});
  const auto out = extract_instances(doc, config());
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].first_paragraph, 0u);
  EXPECT_EQ(out[0].last_paragraph, 2u);
  EXPECT_EQ(out[0].instance_id, "doc:0-2");
  EXPECT_EQ(out[0].text, "增长3.5倍。\n第二段。\n第三段。");
  ASSERT_EQ(out[0].numerics.size(), 1u);
  EXPECT_EQ(out[0].numerics[0].surface, "3.5");
}

TEST(Extract, TooShortDocumentYieldsNothing) {
  EXPECT_TRUE(extract_instances(make_doc({"1。", "2。"}), config()).empty());
}

TEST(Extract, ExtendsUntilSentenceEnd) {
  const auto doc = make_doc({"利率为5%。", "如下", "第一项", "第二项。", "其他1。", "其他2。", "其他3。"});
  const auto out = extract_instances(doc, config());
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].last_paragraph, 3u);
  EXPECT_EQ(out[1].first_paragraph, 4u);
  EXPECT_EQ(out[1].last_paragraph, 6u);
}

TEST(Extract, CapsAtNMaxWithoutTerminator) {
  std::vector<std::string> paras{"数值为7"};
  for (int i = 0; i < 10; ++i) paras.push_back("续" + std::to_string(i));
  const auto out = extract_instances(make_doc(paras), config(3, 5));
  ASSERT_GE(out.size(), 1u);
  EXPECT_EQ(out[0].paragraph_count(), 5u);
  EXPECT_EQ(out[1].first_paragraph, 5u);
}

TEST(Extract, StructuralOnlyCandidateIsDiscarded) {
  const auto doc = make_doc({"见第3章。", "如表4所示。", "参见图5。", "利率为3%。", "b。", "c。"});
  const auto out = extract_instances(doc, config());
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].first_paragraph, 3u);
}

TEST(Extract, NeverCrossesDocuments) {
  // Each document is scanned alone; a 2-paragraph tail is dropped even if the
  // next document could complete it.
  const auto a = make_doc({"1。", "2。", "3。", "4。", "5。"});
  const auto out = extract_instances(a, config());
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].last_paragraph, 2u);
}

TEST(Extract, InvariantsOverRandomDocuments) {
  SeededRng rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n_min = 1 + rng.uniform_below(4);
    const std::size_t n_max = n_min + rng.uniform_below(5);
    const auto doc = testing::random_document(rng, "r" + std::to_string(trial), rng.uniform_below(40));
    const auto out = extract_instances(doc, config(n_min, n_max));
    std::size_t next_free = 0;
    for (const auto& inst : out) {
      ASSERT_GE(inst.paragraph_count(), n_min);
      ASSERT_LE(inst.paragraph_count(), n_max);
      ASSERT_FALSE(inst.numerics.empty());
      ASSERT_GE(inst.first_paragraph, next_free);
      next_free = inst.last_paragraph + 1;
      const bool intact = ends_sentence(doc.paragraphs[inst.last_paragraph].text);
      const bool capped = inst.paragraph_count() == n_max;
      const bool tail = inst.last_paragraph + 1 == doc.paragraphs.size();
      ASSERT_TRUE(intact || capped || tail) << inst.instance_id;
      // Shorter prefixes of at least n_min paragraphs never end a sentence.
      for (std::size_t p = inst.first_paragraph + n_min - 1; p < inst.last_paragraph; ++p) {
        ASSERT_FALSE(ends_sentence(doc.paragraphs[p].text)) << inst.instance_id;
      }
      for (const auto& nv : inst.numerics) {
        ASSERT_FALSE(nv.structural);
        ASSERT_EQ(inst.text.substr(nv.span.begin, nv.span.size()), nv.surface);
      }
    }
    ASSERT_EQ(out.size(), extract_instances(doc, config(n_min, n_max)).size());
  }
}

TEST(Extract, FixtureDocumentMatchesGolden) {
  const auto docs = corpus_from_jsonl(testing::golden("corpus.jsonl"));
  std::vector<Instance> all;
  for (const auto& d : docs) {
    if (d.doc_id != "corp-finance") continue;
    all = extract_instances(d, PipelineConfig{});
  }
  ASSERT_FALSE(all.empty());
  EXPECT_EQ(instances_to_jsonl(all), testing::golden("instances_corp-finance.jsonl"));
}

TEST(Select, CeilingCounts) {
  PipelineConfig cfg;
  SeededRng rng(1);
  cfg.r_ins = Decimal::parse("0.05");
  EXPECT_EQ(select_instances(dummy_instances(100), cfg, rng).size(), 5u);
  EXPECT_EQ(select_instances(dummy_instances(1), cfg, rng).size(), 1u);
  cfg.r_ins = Decimal::parse("0.3");
  EXPECT_EQ(select_instances(dummy_instances(7), cfg, rng).size(), 3u);
  cfg.r_ins = Decimal::parse("1");
  EXPECT_EQ(select_instances(dummy_instances(9), cfg, rng).size(), 9u);
  EXPECT_TRUE(select_instances({}, cfg, rng).empty());
}

TEST(Select, PreservesOrderAndIsDeterministic) {
  PipelineConfig cfg;
  cfg.r_ins = Decimal::parse("0.4");
  const auto all = dummy_instances(30);
  SeededRng a(77);
  SeededRng b(77);
  const auto x = select_instances(all, cfg, a);
  const auto y = select_instances(all, cfg, b);
  ASSERT_EQ(x.size(), 12u);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].instance_id, y[i].instance_id);
    if (i > 0) EXPECT_LT(std::stoi(x[i - 1].instance_id.substr(1)), std::stoi(x[i].instance_id.substr(1)));
  }
}

TEST(Select, EachInstanceEquallyLikely) {
  PipelineConfig cfg;
  cfg.r_ins = Decimal::parse("0.25");
  const auto all = dummy_instances(20);
  std::vector<int> hits(20, 0);
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    SeededRng rng = SeededRng::derive(2024, std::to_string(t));
    for (const auto& inst : select_instances(all, cfg, rng)) ++hits[std::stoi(inst.instance_id.substr(1))];
  }
  for (int h : hits) EXPECT_NEAR(h / double(trials), 0.25, 0.02);
}

// Exhaustive oracle: count the n_selected-subsets of {0..n_ins-1} that avoid
// the n_irr irrelevant items {0..n_irr-1}.
Rational enumerate_relevance(unsigned n_ins, unsigned n_irr, unsigned n_selected) {
  std::uint64_t good = 0;
  std::uint64_t total = 0;
  for (std::uint32_t mask = 0; mask < (1u << n_ins); ++mask) {
    if (static_cast<unsigned>(__builtin_popcount(mask)) != n_selected) continue;
    ++total;
    if ((mask & ((1u << n_irr) - 1)) == 0) ++good;
  }
  return Rational(good, total);
}

TEST(Relevance, WorkedValues) {
  EXPECT_EQ(relevance_probability(10, 0, 4), Rational(1));
  EXPECT_EQ(relevance_probability(10, 2, 3), Rational(56, 120));
  EXPECT_EQ(enumerate_relevance(10, 2, 3), Rational(56, 120));
  EXPECT_EQ(relevance_probability(5, 2, 4), Rational(0));
  EXPECT_EQ(relevance_probability(0, 0, 0), Rational(1));
  EXPECT_NEAR(static_cast<double>(relevance_probability(10, 2, 3)), 0.466667, 1e-6);
}

TEST(Relevance, MatchesEnumerationAndIsMonotone) {
  for (unsigned n = 0; n <= 10; ++n) {
    for (unsigned irr = 0; irr <= n; ++irr) {
      Rational prev(2);
      for (unsigned sel = 0; sel <= n; ++sel) {
        const Rational p = relevance_probability(n, irr, sel);
        ASSERT_EQ(p, enumerate_relevance(n, irr, sel)) << n << " " << irr << " " << sel;
        ASSERT_LE(p, prev);
        prev = p;
        const double lp = log_relevance_probability(n, irr, sel);
        if (p == 0) {
          ASSERT_TRUE(std::isinf(lp) && lp < 0);
        } else {
          ASSERT_NEAR(lp, std::log(static_cast<double>(p)), 1e-9);
        }
      }
    }
  }
}

TEST(Relevance, LogFormScalesToLargeCounts) {
  const double lp = log_relevance_probability(1000000, 1000, 50000);
  EXPECT_TRUE(std::isfinite(lp));
  EXPECT_LT(lp, 0.0);
  EXPECT_NEAR(lp, 50000 * std::log1p(-1000.0 / 1000000), 5.0);
}

TEST(Relevance, InvalidCountsThrow) {
  EXPECT_THROW(relevance_probability(3, 4, 1), InvalidCounts);
  EXPECT_THROW(relevance_probability(3, 1, 4), InvalidCounts);
  EXPECT_THROW(log_relevance_probability(3, 4, 1), InvalidCounts);
}

TEST(Config, ValidateNamesConstraint) {
  auto message = [](PipelineConfig cfg) -> std::string {
    try {
      cfg.validate();
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_EQ(message(PipelineConfig{}), "");
  PipelineConfig c;
  c.n_min = 10;
  c.n_max = 2;
  EXPECT_NE(message(c).find("n_max"), std::string::npos);
  c = {};
  c.n_min = 0;
  EXPECT_NE(message(c).find("n_min"), std::string::npos);
  c = {};
  c.r_ins = Decimal::parse("0");
  EXPECT_NE(message(c).find("r_ins"), std::string::npos);
  c = {};
  c.r_nv = Decimal::parse("1.5");
  EXPECT_NE(message(c).find("r_nv"), std::string::npos);
  c = {};
  c.n_cho = 1;
  EXPECT_NE(message(c).find("n_cho"), std::string::npos);
  c = {};
  c.s = Decimal::parse("-1");
  EXPECT_NE(message(c).find("s"), std::string::npos);
}

}  // namespace
}  // namespace numforge
