#pragma once

#include "numforge/config.hpp"
#include "numforge/corpus.hpp"
#include "numforge/numeric_lex.hpp"
#include "numforge/rng.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace numforge {

/// Consecutive paragraphs of one document holding at least one maskable number.
struct Instance {
  std::string instance_id;  // "<doc_id>:<first>-<last>"
  std::string doc_id;
  std::size_t first_paragraph = 0;  // inclusive
  std::size_t last_paragraph = 0;   // inclusive
  std::string text;                 // paragraphs joined by "\n"
  std::vector<NumericVariable> numerics;

  std::size_t paragraph_count() const { return last_paragraph - first_paragraph + 1; }
};

/// Last code point of the trimmed paragraph is one of 。！？；.!?;:"」』”
bool ends_sentence(std::string_view paragraph);

/// Single forward pass over the document: take n_min paragraphs, extend one
/// at a time until the last one ends a sentence or n_max is reached, drop the
/// candidate if it has no legitimate numeric variable, continue after it.
/// A tail shorter than n_min is dropped; a tail of at least n_min paragraphs
/// that runs out of text before a sentence end is kept.
std::vector<Instance> extract_instances(const CleanDocument& doc, const PipelineConfig& cfg,
                                        const StructuralKeywords& keywords = {});

/// Uniform ceil(r_ins * |all|)-subset, original order preserved.
std::vector<Instance> select_instances(const std::vector<Instance>& all, const PipelineConfig& cfg,
                                       SeededRng& rng);

using Rational = boost::multiprecision::cpp_rational;

/// Probability that a uniform n_selected-subset of n_ins instances avoids all
/// n_irr irrelevant ones: C(n_ins - n_irr, n_selected) / C(n_ins, n_selected).
/// Throws InvalidCounts on n_irr > n_ins or n_selected > n_ins.
Rational relevance_probability(std::uint64_t n_ins, std::uint64_t n_irr, std::uint64_t n_selected);

/// Natural log of relevance_probability via lgamma; -inf when it is zero.
double log_relevance_probability(std::uint64_t n_ins, std::uint64_t n_irr,
                                 std::uint64_t n_selected);

}  // namespace numforge
