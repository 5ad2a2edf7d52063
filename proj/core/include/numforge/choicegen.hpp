#pragma once

#include "numforge/config.hpp"
#include "numforge/decimal.hpp"
#include "numforge/extractor.hpp"
#include "numforge/numeric_lex.hpp"
#include "numforge/rng.hpp"

#include <string>
#include <vector>

namespace numforge {

/// Draws allowed per distractor before precision escalation (float) or
/// InsufficientRange (integer).
inline constexpr int kDistractorRetries = 100;

struct ChoiceSet {
  std::string nv_ref;
  Decimal correct_value;
  std::vector<Decimal> distractors;
  NumericKind kind = NumericKind::kInteger;
  bool precision_escalated = false;  // float: a distractor needed an extra decimal place
  bool zero_widened = false;         // integer v == 0: interval widened to [-s, s]
};

struct FloatDistractors {
  std::vector<Decimal> values;
  bool precision_escalated = false;
};

struct IntDistractors {
  std::vector<Decimal> values;
  bool zero_widened = false;
};

/// Uniform ceil(r_nv * M_t)-subset of the instance's variables, span order kept.
std::vector<NumericVariable> select_variables(const Instance& inst, const PipelineConfig& cfg,
                                              SeededRng& rng);

/// n distinct values uniform on [floor(v), floor(v) + 1], rounded to v's
/// decimal places, all different from v.
FloatDistractors gen_float_distractors(const Decimal& v, std::size_t n, SeededRng& rng);

/// n distinct integers uniform on [-floor(s|v|), floor(s|v|)], all different
/// from v; v == 0 uses [-floor(s), floor(s)].
IntDistractors gen_int_distractors(const Decimal& v, std::size_t n, const Decimal& s,
                                   SeededRng& rng);

ChoiceSet make_choice_set(const NumericVariable& nv, const PipelineConfig& cfg, SeededRng& rng);

}  // namespace numforge
