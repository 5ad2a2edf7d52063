#include "numforge/choicegen.hpp"

#include "numforge/error.hpp"

#include <algorithm>

namespace numforge {

namespace {

bool contains(const std::vector<Decimal>& values, const Decimal& x) {
  return std::find(values.begin(), values.end(), x) != values.end();
}

// Uniform draw on the closed unit interval, rounded half-up to `places`
// decimals, as an integer grid index in [0, 10^places]. The underlying draw
// has max(53, bits(10^places) + 11) bits.
BigInt rounded_unit_draw(std::uint32_t places, SeededRng& rng) {
  const BigInt grid = pow10(places);
  const std::size_t bits = std::max<std::size_t>(53, boost::multiprecision::msb(grid) + 1 + 11);
  const BigInt scale = BigInt(1) << bits;
  const BigInt k = rng.uniform_below(BigInt(scale + 1));
  return (2 * k * grid + scale) / (2 * scale);
}

}  // namespace

std::vector<NumericVariable> select_variables(const Instance& inst, const PipelineConfig& cfg,
                                              SeededRng& rng) {
  const std::size_t total = inst.numerics.size();
  const std::size_t m = std::min(total, ceil_fraction(cfg.r_nv, total));
  std::vector<NumericVariable> out;
  out.reserve(m);
  for (std::size_t i : sample_indices(total, m, rng)) out.push_back(inst.numerics[i]);
  return out;
}

FloatDistractors gen_float_distractors(const Decimal& v, std::size_t n, SeededRng& rng) {
  FloatDistractors out;
  const BigInt base = v.floor();
  std::uint32_t places = v.scale();
  while (out.values.size() < n) {
    bool placed = false;
    for (int attempt = 0; attempt < kDistractorRetries && !placed; ++attempt) {
      const BigInt idx = rounded_unit_draw(places, rng);
      Decimal candidate(base * pow10(places) + idx, places);
      if (candidate == v || contains(out.values, candidate)) continue;
      out.values.push_back(std::move(candidate));
      placed = true;
    }
    if (!placed) {
      ++places;
      out.precision_escalated = true;
    }
  }
  return out;
}

IntDistractors gen_int_distractors(const Decimal& v, std::size_t n, const Decimal& s,
                                   SeededRng& rng) {
  if (!v.is_integral()) throw InputError("gen_int_distractors: value " + v.to_string() + " is not an integer");
  if (!(s > Decimal())) throw ConfigError("scaler s must be > 0");
  IntDistractors out;
  BigInt bound;
  if (v.is_zero()) {
    bound = s.floor();
    out.zero_widened = true;
  } else {
    bound = (s * v.abs()).floor();
  }
  const BigInt v_int = v.floor();
  const BigInt width = 2 * bound + 1;
  const BigInt available = width - ((v_int >= -bound && v_int <= bound) ? 1 : 0);
  if (available < BigInt(n)) {
    throw InsufficientRange("integer interval [-" + bound.str() + ", " + bound.str() +
                            "] cannot supply " + std::to_string(n) + " distractors for " +
                            v.to_string());
  }
  while (out.values.size() < n) {
    bool placed = false;
    for (int attempt = 0; attempt < kDistractorRetries && !placed; ++attempt) {
      Decimal candidate = Decimal::from_integer(rng.uniform_below(width) - bound);
      if (candidate == v || contains(out.values, candidate)) continue;
      out.values.push_back(std::move(candidate));
      placed = true;
    }
    if (!placed) {
      throw InsufficientRange("no new distinct integer distractor for " + v.to_string() + " after " +
                              std::to_string(kDistractorRetries) + " draws");
    }
  }
  return out;
}

ChoiceSet make_choice_set(const NumericVariable& nv, const PipelineConfig& cfg, SeededRng& rng) {
  if (nv.structural) throw InputError("structural variable " + nv.nv_id + " cannot be masked");
  ChoiceSet cs;
  cs.nv_ref = nv.nv_id;
  cs.correct_value = nv.value;
  cs.kind = nv.kind;
  const std::size_t n = cfg.n_cho - 1;
  if (nv.kind == NumericKind::kFloat) {
    auto d = gen_float_distractors(nv.value, n, rng);
    cs.distractors = std::move(d.values);
    cs.precision_escalated = d.precision_escalated;
  } else {
    auto d = gen_int_distractors(nv.value, n, cfg.s, rng);
    cs.distractors = std::move(d.values);
    cs.zero_widened = d.zero_widened;
  }
  return cs;
}

}  // namespace numforge
