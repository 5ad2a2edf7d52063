#pragma once

#include "numforge/nmlf.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <map>
#include <string>

namespace numforge {

/// Thin SVD A = U diag(S) V^T with n = min(rows, cols) triplets, singular
/// values non-increasing, each U column's largest-magnitude entry positive.
struct Svd {
  Eigen::MatrixXd u;  // rows x n, orthonormal columns
  Eigen::VectorXd s;  // n
  Eigen::MatrixXd v;  // cols x n, orthonormal columns
};

/// One-sided (Hestenes) Jacobi SVD. Throws NumericalFailure on non-finite
/// input or when the sweeps do not converge.
Svd jacobi_svd(const Eigen::MatrixXd& a);

/// First min(r, n) triplets of jacobi_svd(a).
Svd truncated_svd(const Eigen::MatrixXd& a, std::size_t r);

/// U' S' V'^T from the top r triplets.
Eigen::MatrixXd low_rank_approximation(const Eigen::MatrixXd& a, std::size_t r);

struct LowRankLayer {
  Eigen::MatrixXd down;  // rank x cols
  Eigen::MatrixXd up;    // rows x rank
};

struct LowRankAdapter {
  std::string name;
  std::map<std::string, LowRankLayer> layers;
  std::size_t rank = 1;
  double scale = 1.0;
};

/// Named full-size weight deltas with a declared rank bound.
struct AdapterDelta {
  std::string name;
  std::map<std::string, Eigen::MatrixXd> layers;
  std::size_t effective_rank = 0;
};

using WeightSet = std::map<std::string, Eigen::MatrixXd>;

/// Per layer: scale * up * down.
AdapterDelta expand_delta(const LowRankAdapter& adapter);

/// Elementwise mean; effective rank r1 + r2.
AdapterDelta mix_mean(const AdapterDelta& a, const AdapterDelta& b);

/// Elementwise sum; effective rank r1 + r2.
AdapterDelta mix_sum(const AdapterDelta& a, const AdapterDelta& b);

/// Mean of the two deltas truncated to its top max(r1, r2) singular triplets.
AdapterDelta mix_svd(const AdapterDelta& a, const AdapterDelta& b, std::size_t r1, std::size_t r2,
                     unsigned jobs = 1);

/// mix_svd with the deltas' own effective ranks.
AdapterDelta mix_svd(const AdapterDelta& a, const AdapterDelta& b, unsigned jobs = 1);

AdapterDelta negate(const AdapterDelta& d);

/// base + delta for every delta layer; base layers absent from the delta pass
/// through unchanged.
WeightSet merge(const WeightSet& base, const AdapterDelta& mixed);

/// Count of singular values above rel_tol * sigma_1.
std::size_t numerical_rank(const Eigen::MatrixXd& a, double rel_tol = 1e-8);

// File conventions on top of NMLF. Factor files hold "<layer>.down" and
// "<layer>.up" entries; delta files hold one entry per layer. Both may carry
// 1x1 "__rank__" and (factor files) "__scale__" metadata entries.
inline constexpr std::string_view kRankEntry = "__rank__";
inline constexpr std::string_view kScaleEntry = "__scale__";

bool is_factor_file(const TensorFile& file);
LowRankAdapter adapter_from_tensors(const TensorFile& file, std::string name);

/// Expands factor files; reads delta files directly. A delta file without
/// "__rank__" gets the largest numerical rank across its layers.
AdapterDelta delta_from_tensors(const TensorFile& file, std::string name);

TensorFile delta_to_tensors(const AdapterDelta& delta, DType dtype = DType::kF64);
TensorFile adapter_to_tensors(const LowRankAdapter& adapter, DType dtype = DType::kF64);

WeightSet weights_from_tensors(const TensorFile& file);

}  // namespace numforge
