#include "numforge/adapter_algebra.hpp"
#include "numforge/extractor.hpp"
#include "numforge/instructions.hpp"
#include "numforge/numeric_lex.hpp"
#include "numforge/rng.hpp"

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

namespace {

using namespace numforge;

std::string synthetic_text(std::size_t sentences) {
  SeededRng rng(1);
  std::string out;
  for (std::size_t i = 0; i < sentences; ++i) {
    out += "截至" + std::to_string(2000 + rng.uniform_below(24)) + "年末，资本充足率为" +
           std::to_string(rng.uniform_below(20)) + "." + std::to_string(rng.uniform_below(100)) +
           "%，见表" + std::to_string(1 + rng.uniform_below(9)) + "。";
  }
  return out;
}

Eigen::MatrixXd random_matrix(SeededRng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = 2 * rng.uniform_unit() - 1;
  return m;
}

void BM_LexNumerics(benchmark::State& state) {
  const std::string text = synthetic_text(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(legitimate_numerics(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_LexNumerics)->Arg(10)->Arg(100)->Arg(1000);

void BM_JacobiSvd(benchmark::State& state) {
  SeededRng rng(2);
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXd m = random_matrix(rng, n, n);
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_svd(m));
}
BENCHMARK(BM_JacobiSvd)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_MixSvd(benchmark::State& state) {
  SeededRng rng(3);
  const auto jobs = static_cast<unsigned>(state.range(0));
  AdapterDelta a{"cp", {}, 64};
  AdapterDelta b{"numct", {}, 8};
  for (int l = 0; l < 8; ++l) {
    a.layers["layer" + std::to_string(l)] = random_matrix(rng, 128, 96);
    b.layers["layer" + std::to_string(l)] = random_matrix(rng, 128, 96);
  }
  for (auto _ : state) benchmark::DoNotOptimize(mix_svd(a, b, jobs));
}
BENCHMARK(BM_MixSvd)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_BuildDataset(benchmark::State& state) {
  std::vector<Instance> instances;
  for (int i = 0; i < state.range(0); ++i) {
    Instance inst;
    inst.instance_id = "bench:" + std::to_string(i);
    inst.doc_id = "bench";
    inst.text = synthetic_text(4);
    inst.numerics = legitimate_numerics(inst.text);
    instances.push_back(std::move(inst));
  }
  const PipelineConfig cfg;
  const BuildOptions opts;
  for (auto _ : state) benchmark::DoNotOptimize(build_dataset(instances, cfg, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildDataset)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
