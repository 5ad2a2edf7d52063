#pragma once

#include "numforge/decimal.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace numforge {

enum class NumericKind { kInteger, kFloat };

std::string_view to_string(NumericKind kind);
NumericKind numeric_kind_from_string(std::string_view s);

/// Half-open byte range [begin, end) into UTF-8 host text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const Span&, const Span&) = default;
};

/// One occurrence of a number in a text.
struct NumericVariable {
  std::string nv_id;  // "nv:<begin>", unique per host text
  Span span;
  std::string surface;
  NumericKind kind = NumericKind::kInteger;
  Decimal value;
  bool structural = false;
};

/// Words that mark a following number as a document-structure index
/// ("Figure 3", "第3章").
struct StructuralKeywords {
  std::vector<std::string> prefixes{"Figure", "Table", "Section", "Chapter", "Eq",
                                    "图", "表", "第", "章", "节", "式", "例"};
  std::vector<std::string> suffixes{"章", "节", "题"};
};

/// Grammar: [sign] digits [. digits]. A sign is only taken when the character
/// before it is not a digit. Results are sorted by span and carry structural
/// flags from the given keyword set.
std::vector<NumericVariable> lex_numerics(std::string_view text,
                                          const StructuralKeywords& keywords = {});

bool detect_structural(std::string_view text, const NumericVariable& nv,
                       const StructuralKeywords& keywords = {});

/// lex_numerics() minus structural variables.
std::vector<NumericVariable> legitimate_numerics(std::string_view text,
                                                 const StructuralKeywords& keywords = {});

}  // namespace numforge
