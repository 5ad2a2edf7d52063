#include "numforge/numeric_lex.hpp"

#include "numforge/error.hpp"
#include "numforge/text.hpp"

#include <algorithm>

namespace numforge {

std::string_view to_string(NumericKind kind) {
  return kind == NumericKind::kFloat ? "float" : "integer";
}

NumericKind numeric_kind_from_string(std::string_view s) {
  if (s == "float") return NumericKind::kFloat;
  if (s == "integer") return NumericKind::kInteger;
  throw InputError("unknown numeric kind '" + std::string(s) + "'");
}

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_ascii(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto lower = [](char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; };
    if (lower(a[i]) != lower(b[i])) return false;
  }
  return true;
}

// Does `before` (text up to the number) end with `keyword`, respecting word
// boundaries for ASCII keywords? ASCII keywords may carry a trailing '.' ("Eq. 3").
bool ends_with_keyword(std::string_view before, std::string_view keyword) {
  if (keyword.empty()) return false;
  if (is_ascii(keyword)) {
    if (!before.empty() && before.back() == '.') before.remove_suffix(1);
    if (before.size() < keyword.size()) return false;
    const std::string_view tail = before.substr(before.size() - keyword.size());
    if (!iequals(tail, keyword)) return false;
    const std::size_t lead = before.size() - keyword.size();
    return lead == 0 || !is_ascii_letter(before[lead - 1]);
  }
  return before.size() >= keyword.size() &&
         before.substr(before.size() - keyword.size()) == keyword;
}

}  // namespace

bool detect_structural(std::string_view text, const NumericVariable& nv,
                       const StructuralKeywords& keywords) {
  std::string_view before = text.substr(0, nv.span.begin);
  if (!before.empty() && before.back() == ' ') before.remove_suffix(1);
  for (const auto& kw : keywords.prefixes) {
    if (ends_with_keyword(before, kw)) return true;
  }
  const std::string_view after = text.substr(nv.span.end);
  for (const auto& kw : keywords.suffixes) {
    if (!kw.empty() && after.substr(0, kw.size()) == kw) return true;
  }
  return false;
}

std::vector<NumericVariable> lex_numerics(std::string_view text, const StructuralKeywords& keywords) {
  std::vector<NumericVariable> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    std::size_t start = i;
    if ((text[i] == '+' || text[i] == '-') && i + 1 < n && is_digit(text[i + 1]) &&
        (i == 0 || !is_digit(text[i - 1]))) {
      ++i;
    } else if (!is_digit(text[i])) {
      ++i;
      continue;
    }
    while (i < n && is_digit(text[i])) ++i;
    bool is_float = false;
    if (i + 1 < n && text[i] == '.' && is_digit(text[i + 1])) {
      is_float = true;
      ++i;
      while (i < n && is_digit(text[i])) ++i;
    }
    NumericVariable nv;
    nv.span = {start, i};
    nv.nv_id = "nv:" + std::to_string(start);
    nv.surface = std::string(text.substr(start, i - start));
    nv.kind = is_float ? NumericKind::kFloat : NumericKind::kInteger;
    nv.value = Decimal::parse(nv.surface);
    nv.structural = detect_structural(text, nv, keywords);
    out.push_back(std::move(nv));
  }
  return out;
}

std::vector<NumericVariable> legitimate_numerics(std::string_view text,
                                                 const StructuralKeywords& keywords) {
  auto all = lex_numerics(text, keywords);
  std::erase_if(all, [](const NumericVariable& nv) { return nv.structural; });
  return all;
}

}  // namespace numforge
