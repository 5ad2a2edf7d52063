#include "numforge/text.hpp"

#include "numforge/error.hpp"
#include "numforge/rng.hpp"

namespace numforge {
namespace utf8 {

Decoded decode(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0xFFFD, 1};
  }
  if (pos + len > s.size()) return {0xFFFD, 1};
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

std::size_t prev_start(std::string_view s, std::size_t pos) {
  std::size_t p = pos - 1;
  std::size_t steps = 0;
  while (p > 0 && steps < 3 && (static_cast<unsigned char>(s[p]) & 0xC0) == 0x80) {
    --p;
    ++steps;
  }
  // Only accept the lead byte if it actually spans up to pos.
  if (decode(s, p).length == pos - p) return p;
  return pos - 1;
}

std::size_t count_code_points(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); i += decode(s, i).length) ++n;
  return n;
}

bool is_space(char32_t cp) {
  switch (cp) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\r':
    case U'\v':
    case U'\f':
    case 0x00A0:
    case 0x2028:
    case 0x2029:
    case 0x3000:
    case 0xFEFF:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200B;
  }
}

}  // namespace utf8

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  while (b < s.size()) {
    const auto d = utf8::decode(s, b);
    if (!utf8::is_space(d.cp)) break;
    b += d.length;
  }
  std::size_t e = s.size();
  while (e > b) {
    const std::size_t p = utf8::prev_start(s, e);
    if (!utf8::is_space(utf8::decode(s, p).cp)) break;
    e = p;
  }
  return s.substr(b, e - b);
}

std::int32_t token_id(std::string_view token) {
  return static_cast<std::int32_t>(fnv1a64(token) & 0x7FFFFFFFULL);
}

std::vector<std::int32_t> Tokenizer::encode(std::string_view text) const {
  std::vector<std::int32_t> ids;
  for (const auto& t : split(text)) ids.push_back(token_id(t));
  return ids;
}

std::vector<std::string> DefaultTokenizer::split(std::string_view text) const {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto d = utf8::decode(text, i);
    if (utf8::is_space(d.cp)) {
      i += d.length;
    } else if (utf8::is_ascii_alnum(d.cp)) {
      std::size_t j = i;
      while (j < text.size() && utf8::is_ascii_alnum(static_cast<unsigned char>(text[j]))) ++j;
      out.emplace_back(text.substr(i, j - i));
      i = j;
    } else {
      out.emplace_back(text.substr(i, d.length));
      i += d.length;
    }
  }
  return out;
}

std::vector<std::string> WhitespaceTokenizer::split(std::string_view text) const {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    auto d = utf8::decode(text, i);
    if (utf8::is_space(d.cp)) {
      i += d.length;
      continue;
    }
    std::size_t j = i;
    while (j < text.size()) {
      d = utf8::decode(text, j);
      if (utf8::is_space(d.cp)) break;
      j += d.length;
    }
    out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::unique_ptr<Tokenizer> make_tokenizer(std::string_view name) {
  if (name == "default") return std::make_unique<DefaultTokenizer>();
  if (name == "whitespace") return std::make_unique<WhitespaceTokenizer>();
  throw ConfigError("unknown tokenizer '" + std::string(name) + "'");
}

}  // namespace numforge
