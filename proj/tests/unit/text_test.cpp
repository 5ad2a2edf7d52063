#include "numforge/error.hpp"
#include "numforge/text.hpp"

#include <gtest/gtest.h>

namespace numforge {
namespace {

using Tokens = std::vector<std::string>;

TEST(Utf8, DecodesMultibyteAndSteppingBack) {
  const std::string s = "a利€😀";
  EXPECT_EQ(utf8::decode(s, 0).cp, U'a');
  EXPECT_EQ(utf8::decode(s, 1).cp, U'利');
  EXPECT_EQ(utf8::decode(s, 1).length, 3u);
  EXPECT_EQ(utf8::decode(s, 4).cp, U'€');
  EXPECT_EQ(utf8::decode(s, 7).cp, U'😀');
  EXPECT_EQ(utf8::decode(s, 7).length, 4u);
  EXPECT_EQ(utf8::prev_start(s, s.size()), 7u);
  EXPECT_EQ(utf8::prev_start(s, 7), 4u);
  EXPECT_EQ(utf8::prev_start(s, 1), 0u);
  EXPECT_EQ(utf8::count_code_points(s), 4u);
}

TEST(Utf8, MalformedBytesAdvanceOneByte) {
  const std::string s = "\xff" "a";
  EXPECT_EQ(utf8::decode(s, 0).cp, U'�');
  EXPECT_EQ(utf8::decode(s, 0).length, 1u);
  const std::string truncated = "\xe5\x88";
  EXPECT_EQ(utf8::decode(truncated, 0).length, 1u);
}

TEST(Utf8, SpaceClassIncludesIdeographicSpace) {
  EXPECT_TRUE(utf8::is_space(U' '));
  EXPECT_TRUE(utf8::is_space(U'\n'));
  EXPECT_TRUE(utf8::is_space(U'　'));
  EXPECT_TRUE(utf8::is_space(U' '));
  EXPECT_FALSE(utf8::is_space(U'利'));
  EXPECT_FALSE(utf8::is_space(U'_'));
}

TEST(Trim, StripsUnicodeWhitespace) {
  EXPECT_EQ(trim("  abc \n"), "abc");
  EXPECT_EQ(trim("　利率　"), "利率");
  EXPECT_EQ(trim(" \t\n "), "");
  EXPECT_EQ(trim(""), "");
}

TEST(DefaultTokenizer, SplitsAsciiRunsCjkAndPunctuation) {
  DefaultTokenizer tok;
  EXPECT_EQ(tok.split("增长3.5倍"), (Tokens{"增", "长", "3", ".", "5", "倍"}));
  EXPECT_EQ(tok.split("GDP growth 12%"), (Tokens{"GDP", "growth", "12", "%"}));
  EXPECT_EQ(tok.split("____"), (Tokens{"_", "_", "_", "_"}));
  EXPECT_EQ(tok.split("答案：　A"), (Tokens{"答", "案", "：", "A"}));
  EXPECT_TRUE(tok.split("  \n").empty());
}

TEST(WhitespaceTokenizer, CountsWords) {
  WhitespaceTokenizer tok;
  EXPECT_EQ(tok.count("a b c"), 3u);
  EXPECT_EQ(tok.split("  a\tbc\n d "), (Tokens{"a", "bc", "d"}));
}

TEST(Tokenizer, IdsAreStableAndNonNegative) {
  DefaultTokenizer tok;
  const auto ids = tok.encode("利率为3.5%");
  ASSERT_EQ(ids.size(), 7u);  // 利 率 为 3 . 5 %
  for (auto id : ids) EXPECT_GE(id, 0);
  EXPECT_EQ(ids, tok.encode("利率为3.5%"));
  EXPECT_EQ(token_id("a"), static_cast<std::int32_t>(0xaf63dc4c8601ec8cull & 0x7fffffffu));
}

TEST(Tokenizer, FactoryKnowsBothNames) {
  EXPECT_EQ(make_tokenizer("default")->name(), "default");
  EXPECT_EQ(make_tokenizer("whitespace")->name(), "whitespace");
  EXPECT_THROW(make_tokenizer("bpe"), ConfigError);
}

}  // namespace
}  // namespace numforge
