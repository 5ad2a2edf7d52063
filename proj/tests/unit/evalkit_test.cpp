#include "numforge/error.hpp"
#include "numforge/evalkit.hpp"
#include "numforge/rng.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace numforge {
namespace {

EvalQuestion question(std::string qid, Subdomain d, std::string stem, std::vector<std::string> options,
                      std::string gold) {
  return EvalQuestion{std::move(qid), "subject", d, std::move(stem), std::move(options), std::move(gold)};
}

EvalQuestion target() {
  return question("t", Subdomain::kAccounting, "某公司年初存货为200万元，年末为300万元，则平均存货为",
                  {"250万元", "500万元", "100万元", "150万元"}, "A");
}

std::vector<EvalQuestion> exemplars() {
  return {question("e1", Subdomain::kFinance, "某银行资本充足率为多少时满足监管要求？",
                   {"6%", "7%", "8%", "9%"}, "C"),
          question("e2", Subdomain::kFinance, "下列属于货币市场工具的是",
                   {"股票", "国库券", "长期债券", "不动产"}, "B"),
          question("e3", Subdomain::kEconomy, "通货膨胀的衡量指标是",
                   {"CPI", "GDP", "M2", "PMI"}, "A")};
}

TEST(Classify, OptionsDecide) {
  EXPECT_EQ(classify_question(target()), QuestionClass::kNumeric);
  EXPECT_EQ(classify_question(exemplars()[1]), QuestionClass::kNonNumeric);
  EXPECT_EQ(classify_question(exemplars()[2]), QuestionClass::kNumeric);  // M2
  auto q = exemplars()[1];
  q.options[3] = "第3章";
  EXPECT_EQ(classify_question(q), QuestionClass::kNumeric);
  q.options = {"甲", "乙", "丙", "丁"};
  q.stem = "2019年利率为3.5%，则";
  EXPECT_EQ(classify_question(q), QuestionClass::kNonNumeric);
}

TEST(Classify, StemMutationNeverChangesClass) {
  SeededRng rng(21);
  auto qs = exemplars();
  qs.push_back(target());
  for (auto q : qs) {
    const auto before = classify_question(q);
    for (int t = 0; t < 50; ++t) {
      q.stem += std::to_string(rng.uniform_below(100000)) + (rng.uniform_below(2) ? "亿元" : "年");
      EXPECT_EQ(classify_question(q), before);
    }
    q.stem.clear();
    EXPECT_EQ(classify_question(q), before);
  }
}

TEST(FewShot, ZeroShotIsTheTemplateAlone) {
  const std::string got = assemble_few_shot(target(), exemplars(), 0);
  EXPECT_EQ(got,
            "以下是关于金融知识的单项选择题，请选出其中的正确答案。\n"
            "某公司年初存货为200万元，年末为300万元，则平均存货为\n"
            "A. 250万元\nB. 500万元\nC. 100万元\nD. 150万元\n答案：");
}

TEST(FewShot, MatchesGolden) {
  EXPECT_EQ(assemble_few_shot(target(), exemplars(), 2), testing::golden("few_shot_k2.txt"));
}

TEST(FewShot, BlockCountAndOrder) {
  const std::string prompt = assemble_few_shot(target(), exemplars(), 3);
  std::size_t blocks = 0;
  for (std::size_t p = prompt.find("以下是"); p != std::string::npos; p = prompt.find("以下是", p + 1)) ++blocks;
  EXPECT_EQ(blocks, 4u);
  EXPECT_LT(prompt.find("资本充足率"), prompt.find("货币市场"));
  EXPECT_LT(prompt.find("货币市场"), prompt.find("通货膨胀"));
  EXPECT_TRUE(prompt.ends_with("答案："));
}

TEST(FewShot, InsufficientExemplars) {
  EXPECT_THROW(assemble_few_shot(target(), exemplars(), 5), InsufficientExemplars);
  EXPECT_THROW(assemble_few_shot(target(), {}, 1), InsufficientExemplars);
}

TEST(PickAnswer, ArgmaxWithLowestIndexTies) {
  const auto ids = default_identifiers(4);
  EXPECT_EQ(pick_answer({0.1, 0.7, 0.1, 0.1}, ids), "B");
  EXPECT_EQ(pick_answer({-3, -1, -2, -5}, ids), "B");
  EXPECT_EQ(pick_answer({0.4, 0.1, 0.4, 0.1}, ids), "A");
  EXPECT_EQ(pick_answer({0, 0, 0, 0}, ids), "A");
  EXPECT_EQ(pick_answer({0.1, 0.2, 0.3, 0.3}, ids), "C");
  EXPECT_THROW(pick_answer({1, 2}, ids), InputError);
  EXPECT_THROW(pick_answer({}, {}), InputError);
}

TEST(Score, WorkedExample) {
  const std::vector<EvalQuestion> qs = {
      question("n1", Subdomain::kFinance, "s", {"1", "2", "3", "4"}, "A"),
      question("n2", Subdomain::kFinance, "s", {"1", "2", "3", "4"}, "B"),
      question("x1", Subdomain::kFinance, "s", {"甲", "乙", "丙", "丁"}, "C"),
      question("x2", Subdomain::kFinance, "s", {"甲", "乙", "丙", "丁"}, "D")};
  const auto report = score(qs, {{"n1", "A"}, {"n2", "C"}, {"x1", "C"}, {"x2", "D"}});
  const auto& f = report.per_subdomain.at(Subdomain::kFinance);
  EXPECT_EQ(f.n_count, 2u);
  EXPECT_EQ(f.non_n_count, 2u);
  EXPECT_DOUBLE_EQ(*f.n_acc(), 50.0);
  EXPECT_DOUBLE_EQ(*f.non_n_acc(), 100.0);
  EXPECT_DOUBLE_EQ(*f.avg_acc(), 75.0);
  EXPECT_FALSE(report.per_subdomain.at(Subdomain::kAccounting).avg_acc().has_value());
  EXPECT_DOUBLE_EQ(*report.overall.avg_acc(), 75.0);
  EXPECT_NE(report.to_table().find("   50.00  100.00   75.00"), std::string::npos);
}

TEST(Score, MissingPredictionNamesQuestion) {
  try {
    score({target()}, {});
    FAIL();
  } catch (const MissingPrediction& e) {
    EXPECT_NE(std::string(e.what()).find("t"), std::string::npos);
  }
}

std::vector<EvalQuestion> random_questions(SeededRng& rng, std::size_t n) {
  std::vector<EvalQuestion> out;
  const auto ids = default_identifiers(4);
  for (std::size_t i = 0; i < n; ++i) {
    const bool numeric = rng.uniform_below(2) == 0;
    std::vector<std::string> opts = numeric ? std::vector<std::string>{"1.5", "2", "3", "4"}
                                            : std::vector<std::string>{"甲", "乙", "丙", "丁"};
    out.push_back(question("q" + std::to_string(i), kAllSubdomains[rng.uniform_below(4)], "stem", opts,
                           ids[rng.uniform_below(4)]));
  }
  return out;
}

TEST(Score, PermutationInvarianceAndPartitionLaw) {
  SeededRng rng(22);
  auto qs = random_questions(rng, 300);
  std::map<std::string, std::string> preds;
  const auto ids = default_identifiers(4);
  for (const auto& q : qs) preds[q.qid] = ids[rng.uniform_below(4)];
  const auto base = score(qs, preds);

  std::size_t total = 0;
  std::size_t correct = 0;
  for (const auto& [d, g] : base.per_subdomain) {
    total += g.total();
    correct += g.n_correct + g.non_n_correct;
  }
  EXPECT_EQ(total, qs.size());
  EXPECT_EQ(base.overall.total(), qs.size());
  EXPECT_EQ(correct, base.overall.n_correct + base.overall.non_n_correct);

  for (int t = 0; t < 10; ++t) {
    for (std::size_t i = qs.size() - 1; i > 0; --i) std::swap(qs[i], qs[rng.uniform_below(i + 1)]);
    EXPECT_EQ(score(qs, preds).to_json(), base.to_json());
  }
}

TEST(Load, CsvWithQuotesAndJsonl) {
  const std::string csv =
      "\xEF\xBB\xBFqid,subject,subdomain,stem,A,B,C,D,gold\r\n"
      "q1,accounting,Accounting,\"含逗号,的题干\",1,2,3,4,B\r\n"
      "q2,banking,finance,\"多行\n\"\"引号\"\"\",甲,乙,丙,丁,D\r\n";
  const auto qs = parse_questions_csv(csv);
  ASSERT_EQ(qs.size(), 2u);
  EXPECT_EQ(qs[0].stem, "含逗号,的题干");
  EXPECT_EQ(qs[0].subdomain, Subdomain::kAccounting);
  EXPECT_EQ(qs[1].stem, "多行\n\"引号\"");
  EXPECT_EQ(qs[1].subdomain, Subdomain::kFinance);
  EXPECT_EQ(qs[1].options[3], "丁");
  EXPECT_THROW(parse_questions_csv("qid,subject,subdomain,stem,A,B,C,gold\n"), InputError);
  EXPECT_THROW(parse_csv("a,\"open\n"), InputError);

  const auto js = parse_questions_jsonl(
      "{\"qid\":\"j1\",\"subject\":\"s\",\"subdomain\":\"Economy\",\"stem\":\"x\","
      "\"options\":[\"1\",\"2\",\"3\",\"4\"],\"gold\":\"A\"}\n\n");
  ASSERT_EQ(js.size(), 1u);
  EXPECT_EQ(js[0].subdomain, Subdomain::kEconomy);
  EXPECT_THROW(parse_questions_jsonl("{not json}\n"), InputError);
}

TEST(Load, PredictionsByIdentifierOrScores) {
  const auto preds = parse_predictions_jsonl(
      "{\"qid\":\"a\",\"identifier\":\"C\"}\n"
      "{\"qid\":\"b\",\"scores\":[0.1,0.9,0.9,0.0]}\n");
  EXPECT_EQ(preds.at("b"), "B");
  EXPECT_EQ(preds.size(), 2u);
}

}  // namespace
}  // namespace numforge
