#include "numforge/numeric_lex.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

namespace numforge {
namespace {

std::vector<std::string> surfaces(const std::vector<NumericVariable>& nvs) {
  std::vector<std::string> out;
  for (const auto& nv : nvs) out.push_back(nv.surface);
  return out;
}

TEST(Lex, FloatAndIntegerInChineseText) {
  const std::string text = "增长3.5倍,共12次";
  const auto nvs = lex_numerics(text);
  ASSERT_EQ(nvs.size(), 2u);
  EXPECT_EQ(nvs[0].surface, "3.5");
  EXPECT_EQ(nvs[0].kind, NumericKind::kFloat);
  EXPECT_EQ(nvs[0].value, Decimal::parse("3.5"));
  EXPECT_EQ(nvs[1].surface, "12");
  EXPECT_EQ(nvs[1].kind, NumericKind::kInteger);
  EXPECT_EQ(nvs[1].value, Decimal::parse("12"));
  for (const auto& nv : nvs) {
    EXPECT_EQ(text.substr(nv.span.begin, nv.span.size()), nv.surface);
    EXPECT_FALSE(nv.structural);
  }
}

TEST(Lex, NoDigitsNoVariables) { EXPECT_TRUE(lex_numerics("没有数字").empty()); }

TEST(Lex, FigureNumberIsStructural) {
  const auto nvs = lex_numerics("Figure 3 shows");
  ASSERT_EQ(nvs.size(), 1u);
  EXPECT_TRUE(nvs[0].structural);
}

TEST(Lex, SignOnlyAfterNonDigit) {
  EXPECT_EQ(surfaces(lex_numerics("变动为-0.8%")), (std::vector<std::string>{"-0.8"}));
  EXPECT_EQ(surfaces(lex_numerics("取值范围是-1到1")), (std::vector<std::string>{"-1", "1"}));
  EXPECT_EQ(surfaces(lex_numerics("2019-2020")), (std::vector<std::string>{"2019", "2020"}));
  EXPECT_EQ(lex_numerics("x+5")[0].value, Decimal::parse("5"));
  EXPECT_EQ(surfaces(lex_numerics("--3")), (std::vector<std::string>{"-3"}));
}

TEST(Lex, PointNeedsDigitsOnBothSides) {
  EXPECT_EQ(surfaces(lex_numerics("共12.")), (std::vector<std::string>{"12"}));
  EXPECT_EQ(surfaces(lex_numerics(".5")), (std::vector<std::string>{"5"}));
  EXPECT_EQ(surfaces(lex_numerics("1.2.3")), (std::vector<std::string>{"1.2", "3"}));
  EXPECT_EQ(lex_numerics("3.0")[0].kind, NumericKind::kFloat);
}

TEST(Lex, PercentAndSeparatorsAreNotPartOfTheNumber) {
  EXPECT_EQ(surfaces(lex_numerics("3.5%")), (std::vector<std::string>{"3.5"}));
  EXPECT_EQ(surfaces(lex_numerics("1,000")), (std::vector<std::string>{"1", "000"}));
  EXPECT_EQ(surfaces(lex_numerics("1e5")), (std::vector<std::string>{"1", "5"}));
}

TEST(Lex, EqualValuesAtDifferentSpansAreDistinct) {
  const auto nvs = lex_numerics("12和12");
  ASSERT_EQ(nvs.size(), 2u);
  EXPECT_NE(nvs[0].nv_id, nvs[1].nv_id);
  EXPECT_NE(nvs[0].span, nvs[1].span);
  EXPECT_EQ(nvs[0].nv_id, "nv:0");
}

TEST(Structural, KeywordPrefixes) {
  auto flag = [](const std::string& text) {
    const auto nvs = lex_numerics(text);
    EXPECT_EQ(nvs.size(), 1u) << text;
    return nvs.empty() ? false : nvs[0].structural;
  };
  EXPECT_TRUE(flag("表 4 列出"));
  EXPECT_FALSE(flag("利润为4万元"));
  EXPECT_TRUE(flag("第12章"));
  EXPECT_TRUE(flag("如图2所示"));
  EXPECT_TRUE(flag("see Table 7"));
  EXPECT_TRUE(flag("see table 7"));
  EXPECT_TRUE(flag("Eq. 2 gives"));
  EXPECT_TRUE(flag("习题5题"));
  EXPECT_FALSE(flag("Tables  7"));  // two spaces: only one is skipped
  EXPECT_FALSE(flag("Portable 7"));  // keyword must start a word
  EXPECT_TRUE(flag("第 3 年"));
}

TEST(Structural, ConfigurableKeywordSet) {
  StructuralKeywords kw;
  kw.prefixes = {"Exhibit"};
  kw.suffixes = {};
  EXPECT_TRUE(lex_numerics("Exhibit 9", kw)[0].structural);
  EXPECT_FALSE(lex_numerics("第12章", kw)[0].structural);
}

TEST(Legitimate, DropsStructuralOnly) {
  const auto nvs = legitimate_numerics("Figure 3 shows 2.5% growth");
  ASSERT_EQ(nvs.size(), 1u);
  EXPECT_EQ(nvs[0].surface, "2.5");
  EXPECT_TRUE(legitimate_numerics("见第3章和表4").empty());
}

TEST(Legitimate, FixtureInstanceMatchesGolden) {
  const std::string text = testing::fixture("lex_input.txt");
  std::string got;
  for (const auto& nv : legitimate_numerics(text)) {
    got += nv.nv_id + "\t" + nv.surface + "\t" + std::string(to_string(nv.kind)) + "\t" +
           nv.value.to_string() + "\n";
  }
  EXPECT_EQ(got, testing::golden("lex_legitimate.tsv"));
}

TEST(LexProperties, MaximalSortedDisjointAndDeterministic) {
  SeededRng rng(17);
  const std::string alphabet[] = {"1", "0", "9", ".", "-", "+", " ", "利", "a", "%", "第", "章"};
  for (int trial = 0; trial < 5000; ++trial) {
    std::string text;
    const auto len = rng.uniform_below(25);
    for (std::size_t i = 0; i < len; ++i) text += alphabet[rng.uniform_below(12)];
    const auto nvs = lex_numerics(text);
    ASSERT_EQ(surfaces(nvs), surfaces(lex_numerics(text)));
    std::size_t prev_end = 0;
    for (const auto& nv : nvs) {
      ASSERT_GE(nv.span.begin, prev_end) << text;
      prev_end = nv.span.end;
      ASSERT_EQ(text.substr(nv.span.begin, nv.span.size()), nv.surface);
      ASSERT_EQ(nv.kind == NumericKind::kFloat, nv.surface.find('.') != std::string::npos);
      // Maximal: neighbours cannot extend the token.
      const auto digit = [](char c) { return c >= '0' && c <= '9'; };
      if (nv.span.begin > 0) ASSERT_FALSE(digit(text[nv.span.begin - 1])) << text;
      if (nv.span.end < text.size()) {
        ASSERT_FALSE(digit(text[nv.span.end])) << text;
        if (text[nv.span.end] == '.' && nv.kind == NumericKind::kInteger) {
          ASSERT_TRUE(nv.span.end + 1 >= text.size() || !digit(text[nv.span.end + 1])) << text;
        }
      }
      ASSERT_EQ(nv.structural, detect_structural(text, nv));
    }
    // legitimate ⊆ lex, filtered exactly by the flag.
    std::vector<std::string> expected;
    for (const auto& nv : nvs) {
      if (!nv.structural) expected.push_back(nv.nv_id);
    }
    std::vector<std::string> got;
    for (const auto& nv : legitimate_numerics(text)) got.push_back(nv.nv_id);
    ASSERT_EQ(got, expected);
  }
}

}  // namespace
}  // namespace numforge
