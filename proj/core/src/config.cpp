#include "numforge/config.hpp"

#include "numforge/error.hpp"

#include <string>

namespace numforge {

void PipelineConfig::validate() const {
  if (n_min < 1) throw ConfigError("n_min must be >= 1");
  if (n_max < n_min) {
    throw ConfigError("n_max (" + std::to_string(n_max) + ") must be >= n_min (" +
                      std::to_string(n_min) + ")");
  }
  const Decimal zero;
  const Decimal one = Decimal::from_integer(1);
  if (!(r_ins > zero && r_ins <= one)) throw ConfigError("r_ins must be in (0, 1], got " + r_ins.to_string());
  if (!(r_nv > zero && r_nv <= one)) throw ConfigError("r_nv must be in (0, 1], got " + r_nv.to_string());
  if (n_cho < 2) throw ConfigError("n_cho must be >= 2");
  if (!(s > zero)) throw ConfigError("s must be > 0, got " + s.to_string());
}

}  // namespace numforge
