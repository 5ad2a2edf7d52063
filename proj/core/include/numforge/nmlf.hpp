#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace numforge {

/// NMLF tensor container, little-endian throughout:
///
///   "NMLF" | version u32 | entry count u32 |
///   entries: name length u16 | UTF-8 name | dtype u8 (0 = f32, 1 = f64) |
///            rows u32 | cols u32 | row-major payload
///
/// Readers reject a wrong magic, unknown version or dtype, truncation and
/// trailing bytes.
inline constexpr std::uint32_t kNmlfVersion = 1;

enum class DType : std::uint8_t { kF32 = 0, kF64 = 1 };

struct TensorEntry {
  std::string name;
  DType dtype = DType::kF64;
  Eigen::MatrixXd data;
};

struct TensorFile {
  std::vector<TensorEntry> entries;

  const TensorEntry* find(std::string_view name) const;
};

std::string serialize_nmlf(const TensorFile& file);
TensorFile parse_nmlf(std::string_view bytes);

TensorFile read_nmlf(const std::filesystem::path& path);
void write_nmlf(const std::filesystem::path& path, const TensorFile& file);

}  // namespace numforge
