#include "numforge/adapter_algebra.hpp"

#include "numforge/error.hpp"
#include "numforge/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace numforge {

namespace {

constexpr int kMaxSweeps = 80;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Orthonormal column for slot j of `u` that is orthogonal to every column in
// `filled`, built from the first standard basis vector that survives
// re-orthogonalization.
Eigen::VectorXd complete_column(const Eigen::MatrixXd& u, const std::vector<Eigen::Index>& filled) {
  const Eigen::Index m = u.rows();
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::VectorXd x = Eigen::VectorXd::Unit(m, i);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index c : filled) x -= u.col(c).dot(x) * u.col(c);
    }
    const double norm = x.norm();
    if (norm > 0.5) return x / norm;
  }
  throw NumericalFailure("cannot complete orthonormal basis");
}

// Hestenes iteration on the columns of w (m x n, m >= n). On return w holds
// U * diag(S) and v holds V.
void hestenes(Eigen::MatrixXd& w, Eigen::MatrixXd& v) {
  const Eigen::Index n = w.cols();
  v = Eigen::MatrixXd::Identity(n, n);
  const double tol = kEps * static_cast<double>(std::max<Eigen::Index>(w.rows(), 1));
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = w.col(p).squaredNorm();
        const double beta = w.col(q).squaredNorm();
        const double gamma = w.col(p).dot(w.col(q));
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
          const double wp = w(i, p);
          const double wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) return;
  }
  throw NumericalFailure("Jacobi SVD did not converge in " + std::to_string(kMaxSweeps) + " sweeps");
}

void check_same_layers(const AdapterDelta& a, const AdapterDelta& b) {
  if (a.layers.size() != b.layers.size()) {
    throw LayerMismatch("deltas '" + a.name + "' and '" + b.name + "' have " +
                        std::to_string(a.layers.size()) + " vs " + std::to_string(b.layers.size()) +
                        " layers");
  }
  for (const auto& [name, m] : a.layers) {
    auto it = b.layers.find(name);
    if (it == b.layers.end()) {
      throw LayerMismatch("layer '" + name + "' of '" + a.name + "' missing from '" + b.name + "'");
    }
    if (it->second.rows() != m.rows() || it->second.cols() != m.cols()) {
      throw ShapeError("layer '" + name + "': " + std::to_string(m.rows()) + "x" +
                       std::to_string(m.cols()) + " vs " + std::to_string(it->second.rows()) + "x" +
                       std::to_string(it->second.cols()));
    }
  }
}

template <class Op>
AdapterDelta combine(const AdapterDelta& a, const AdapterDelta& b, std::string name, Op op) {
  check_same_layers(a, b);
  AdapterDelta out;
  out.name = std::move(name);
  out.effective_rank = a.effective_rank + b.effective_rank;
  for (const auto& [layer, m] : a.layers) out.layers.emplace(layer, op(m, b.layers.at(layer)));
  return out;
}

double scalar_entry(const TensorEntry& e) {
  if (e.data.rows() != 1 || e.data.cols() != 1) {
    throw FormatError("metadata entry '" + e.name + "' must be 1x1");
  }
  return e.data(0, 0);
}

std::size_t rank_entry(const TensorEntry& e) {
  const double r = scalar_entry(e);
  if (!(r >= 1.0) || r != std::floor(r)) {
    throw FormatError("'" + e.name + "' must hold a positive integer");
  }
  return static_cast<std::size_t>(r);
}

bool is_meta(std::string_view name) { return name == kRankEntry || name == kScaleEntry; }

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

Svd jacobi_svd(const Eigen::MatrixXd& a) {
  if (!a.allFinite()) throw NumericalFailure("SVD input contains NaN or Inf");
  const bool transposed = a.rows() < a.cols();
  Eigen::MatrixXd w = transposed ? Eigen::MatrixXd(a.transpose()) : a;
  Eigen::MatrixXd v;
  hestenes(w, v);

  const Eigen::Index n = w.cols();
  Eigen::VectorXd sigma(n);
  for (Eigen::Index j = 0; j < n; ++j) sigma(j) = w.col(j).norm();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return sigma(x) > sigma(y); });

  const double sigma_max = n > 0 ? sigma(order.front()) : 0.0;
  const double zero_cut = sigma_max * kEps * static_cast<double>(std::max(w.rows(), n));

  Svd out;
  out.u.resize(w.rows(), n);
  out.s.resize(n);
  out.v.resize(n, n);
  std::vector<Eigen::Index> filled;
  std::vector<Eigen::Index> pending;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index j = order[static_cast<std::size_t>(k)];
    out.s(k) = sigma(j);
    out.v.col(k) = v.col(j);
    if (sigma(j) > zero_cut && sigma(j) > 0.0) {
      out.u.col(k) = w.col(j) / sigma(j);
      filled.push_back(k);
    } else {
      pending.push_back(k);
    }
  }
  for (Eigen::Index k : pending) {
    out.u.col(k) = complete_column(out.u, filled);
    filled.push_back(k);
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index arg = 0;
    out.u.col(k).cwiseAbs().maxCoeff(&arg);
    if (out.u(arg, k) < 0.0) {
      out.u.col(k) = -out.u.col(k);
      out.v.col(k) = -out.v.col(k);
    }
  }
  if (transposed) {
    // A^T = U S V^T  =>  A = V S U^T; re-fix signs on the new U.
    std::swap(out.u, out.v);
    for (Eigen::Index k = 0; k < n; ++k) {
      Eigen::Index arg = 0;
      out.u.col(k).cwiseAbs().maxCoeff(&arg);
      if (out.u(arg, k) < 0.0) {
        out.u.col(k) = -out.u.col(k);
        out.v.col(k) = -out.v.col(k);
      }
    }
  }
  return out;
}

Svd truncated_svd(const Eigen::MatrixXd& a, std::size_t r) {
  Svd full = jacobi_svd(a);
  const Eigen::Index keep = std::min<Eigen::Index>(static_cast<Eigen::Index>(r), full.s.size());
  return Svd{full.u.leftCols(keep), full.s.head(keep), full.v.leftCols(keep)};
}

Eigen::MatrixXd low_rank_approximation(const Eigen::MatrixXd& a, std::size_t r) {
  const Svd t = truncated_svd(a, r);
  return t.u * t.s.asDiagonal() * t.v.transpose();
}

std::size_t numerical_rank(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.size() == 0) return 0;
  const Svd svd = jacobi_svd(a);
  if (svd.s.size() == 0 || svd.s(0) == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < svd.s.size(); ++i) {
    if (svd.s(i) > rel_tol * svd.s(0)) ++r;
  }
  return r;
}

AdapterDelta expand_delta(const LowRankAdapter& adapter) {
  AdapterDelta out;
  out.name = adapter.name;
  out.effective_rank = adapter.rank;
  const auto r = static_cast<Eigen::Index>(adapter.rank);
  for (const auto& [name, layer] : adapter.layers) {
    if (layer.up.cols() != r || layer.down.rows() != r) {
      throw ShapeError("layer '" + name + "': up is " + std::to_string(layer.up.rows()) + "x" +
                       std::to_string(layer.up.cols()) + ", down is " +
                       std::to_string(layer.down.rows()) + "x" + std::to_string(layer.down.cols()) +
                       ", declared rank " + std::to_string(adapter.rank));
    }
    out.layers.emplace(name, adapter.scale * (layer.up * layer.down));
  }
  return out;
}

AdapterDelta mix_mean(const AdapterDelta& a, const AdapterDelta& b) {
  return combine(a, b, "mean(" + a.name + "," + b.name + ")",
                 [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) -> Eigen::MatrixXd {
                   return (x + y) / 2.0;
                 });
}

AdapterDelta mix_sum(const AdapterDelta& a, const AdapterDelta& b) {
  return combine(a, b, "sum(" + a.name + "," + b.name + ")",
                 [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) -> Eigen::MatrixXd {
                   return x + y;
                 });
}

AdapterDelta mix_svd(const AdapterDelta& a, const AdapterDelta& b, std::size_t r1, std::size_t r2,
                     unsigned jobs) {
  if (r1 < 1 || r2 < 1) throw ShapeError("mix_svd needs ranks >= 1");
  const AdapterDelta mean = mix_mean(a, b);
  const std::size_t r = std::max(r1, r2);

  std::vector<const std::string*> names;
  for (const auto& [name, m] : mean.layers) names.push_back(&name);
  std::vector<Eigen::MatrixXd> mixed(names.size());
  parallel_for(names.size(), jobs, [&](std::size_t i) {
    try {
      mixed[i] = low_rank_approximation(mean.layers.at(*names[i]), r);
    } catch (const NumericalFailure& e) {
      throw NumericalFailure("layer '" + *names[i] + "': " + e.what());
    }
  });

  AdapterDelta out;
  out.name = "svd(" + a.name + "," + b.name + ")";
  out.effective_rank = r;
  for (std::size_t i = 0; i < names.size(); ++i) out.layers.emplace(*names[i], std::move(mixed[i]));
  return out;
}

AdapterDelta mix_svd(const AdapterDelta& a, const AdapterDelta& b, unsigned jobs) {
  return mix_svd(a, b, a.effective_rank, b.effective_rank, jobs);
}

AdapterDelta negate(const AdapterDelta& d) {
  AdapterDelta out = d;
  for (auto& [name, m] : out.layers) m = -m;
  out.name = "-" + d.name;
  return out;
}

WeightSet merge(const WeightSet& base, const AdapterDelta& mixed) {
  WeightSet out = base;
  for (const auto& [name, delta] : mixed.layers) {
    auto it = out.find(name);
    if (it == out.end()) throw LayerMismatch("delta layer '" + name + "' not present in base weights");
    if (it->second.rows() != delta.rows() || it->second.cols() != delta.cols()) {
      throw ShapeError("layer '" + name + "': base " + std::to_string(it->second.rows()) + "x" +
                       std::to_string(it->second.cols()) + " vs delta " +
                       std::to_string(delta.rows()) + "x" + std::to_string(delta.cols()));
    }
    it->second += delta;
  }
  return out;
}

bool is_factor_file(const TensorFile& file) {
  return std::any_of(file.entries.begin(), file.entries.end(), [](const TensorEntry& e) {
    return ends_with(e.name, ".up") || ends_with(e.name, ".down");
  });
}

LowRankAdapter adapter_from_tensors(const TensorFile& file, std::string name) {
  LowRankAdapter out;
  out.name = std::move(name);
  std::size_t declared = 0;
  for (const auto& e : file.entries) {
    if (e.name == kRankEntry) {
      declared = rank_entry(e);
    } else if (e.name == kScaleEntry) {
      out.scale = scalar_entry(e);
    } else if (ends_with(e.name, ".up")) {
      out.layers[e.name.substr(0, e.name.size() - 3)].up = e.data;
    } else if (ends_with(e.name, ".down")) {
      out.layers[e.name.substr(0, e.name.size() - 5)].down = e.data;
    } else {
      throw FormatError("factor file entry '" + e.name + "' is neither <layer>.up nor <layer>.down");
    }
  }
  if (out.layers.empty()) throw FormatError("adapter '" + out.name + "' has no layers");
  for (const auto& [layer, f] : out.layers) {
    if (f.up.size() == 0 || f.down.size() == 0) {
      throw FormatError("layer '" + layer + "' lacks its " + (f.up.size() == 0 ? "up" : "down") + " factor");
    }
  }
  out.rank = declared ? declared : static_cast<std::size_t>(out.layers.begin()->second.up.cols());
  return out;
}

AdapterDelta delta_from_tensors(const TensorFile& file, std::string name) {
  if (is_factor_file(file)) return expand_delta(adapter_from_tensors(file, std::move(name)));
  AdapterDelta out;
  out.name = std::move(name);
  std::size_t declared = 0;
  for (const auto& e : file.entries) {
    if (e.name == kRankEntry) {
      declared = rank_entry(e);
    } else if (e.name == kScaleEntry) {
      throw FormatError("'__scale__' only applies to factor files");
    } else {
      out.layers.emplace(e.name, e.data);
    }
  }
  if (out.layers.empty()) throw FormatError("delta '" + out.name + "' has no layers");
  if (declared) {
    out.effective_rank = declared;
  } else {
    for (const auto& [layer, m] : out.layers) {
      out.effective_rank = std::max(out.effective_rank, numerical_rank(m));
    }
    out.effective_rank = std::max<std::size_t>(out.effective_rank, 1);
  }
  return out;
}

TensorFile delta_to_tensors(const AdapterDelta& delta, DType dtype) {
  TensorFile file;
  file.entries.push_back(
      {std::string(kRankEntry), DType::kF64,
       Eigen::MatrixXd::Constant(1, 1, static_cast<double>(delta.effective_rank))});
  for (const auto& [name, m] : delta.layers) file.entries.push_back({name, dtype, m});
  return file;
}

TensorFile adapter_to_tensors(const LowRankAdapter& adapter, DType dtype) {
  TensorFile file;
  file.entries.push_back({std::string(kRankEntry), DType::kF64,
                          Eigen::MatrixXd::Constant(1, 1, static_cast<double>(adapter.rank))});
  file.entries.push_back(
      {std::string(kScaleEntry), DType::kF64, Eigen::MatrixXd::Constant(1, 1, adapter.scale)});
  for (const auto& [name, layer] : adapter.layers) {
    file.entries.push_back({name + ".down", dtype, layer.down});
    file.entries.push_back({name + ".up", dtype, layer.up});
  }
  return file;
}

WeightSet weights_from_tensors(const TensorFile& file) {
  WeightSet out;
  for (const auto& e : file.entries) {
    if (is_meta(e.name)) continue;
    out.emplace(e.name, e.data);
  }
  return out;
}

}  // namespace numforge
