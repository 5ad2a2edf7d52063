#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace numforge {

// UTF-8 helpers. Malformed bytes decode as U+FFFD and advance one byte.
namespace utf8 {

struct Decoded {
  char32_t cp;
  std::size_t length;
};

Decoded decode(std::string_view s, std::size_t pos);

/// Start offset of the code point ending right before `pos` (pos > 0).
std::size_t prev_start(std::string_view s, std::size_t pos);

std::size_t count_code_points(std::string_view s);

bool is_space(char32_t cp);

inline bool is_ascii_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }
inline bool is_ascii_alnum(char32_t cp) {
  return is_ascii_digit(cp) || (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z');
}

}  // namespace utf8

/// Trims Unicode whitespace from both ends.
std::string_view trim(std::string_view s);

/// Text-to-token mapping. Token ids are stable across runs and platforms.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual std::vector<std::string> split(std::string_view text) const = 0;
  virtual std::string name() const = 0;

  /// Token id = low 31 bits of FNV-1a over the token bytes; always >= 0.
  std::vector<std::int32_t> encode(std::string_view text) const;

  std::size_t count(std::string_view text) const { return split(text).size(); }
};

/// One token per ASCII alphanumeric run, one per non-ASCII code point,
/// one per other non-space character ("____" is four tokens).
class DefaultTokenizer final : public Tokenizer {
 public:
  std::vector<std::string> split(std::string_view text) const override;
  std::string name() const override { return "default"; }
};

/// Whitespace-separated words.
class WhitespaceTokenizer final : public Tokenizer {
 public:
  std::vector<std::string> split(std::string_view text) const override;
  std::string name() const override { return "whitespace"; }
};

/// "default" or "whitespace"; throws ConfigError otherwise.
std::unique_ptr<Tokenizer> make_tokenizer(std::string_view name);

std::int32_t token_id(std::string_view token);

}  // namespace numforge
