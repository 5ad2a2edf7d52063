#pragma once

#include "numforge/decimal.hpp"

#include <cstddef>
#include <cstdint>

namespace numforge {

/// Hyperparameters of instance extraction and choice generation.
/// Ratios and the scaler are exact decimals.
struct PipelineConfig {
  std::size_t n_min = 3;
  std::size_t n_max = 8;
  Decimal r_ins = Decimal::parse("0.05");
  Decimal r_nv = Decimal::parse("0.3");
  std::size_t n_cho = 4;
  Decimal s = Decimal::parse("1000");
  std::uint64_t seed = 42;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
};

}  // namespace numforge
