#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "icy/metrics.hpp"
#include "icy/noise.hpp"
#include "icy/render.hpp"
#include "icy/stereo.hpp"

namespace {

using namespace icy;

void BM_BlockMatch(benchmark::State& state) {
  const auto pair = testing::make_shift_pair(640, 480, 17, 1);
  BlockMatchParams p;
  p.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(block_match(pair.left, pair.right, p));
  state.SetLabel("640x480, 96 disparities, window 49");
}
BENCHMARK(BM_BlockMatch)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_PyramidMatch(benchmark::State& state) {
  const auto pair = testing::make_shift_pair(640, 480, 17, 2);
  PyramidParams p;
  p.base.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(pyramid_match(pair.left, pair.right, p));
}
BENCHMARK(BM_PyramidMatch)->Unit(benchmark::kMillisecond);

void BM_RenderPlane(benchmark::State& state) {
  const Scene scene = testing::plane_scene(5.0, testing::textured_material(),
                                           testing::sun_only(35.0), 640, 480);
  RenderSettings s;
  s.shadow_samples = static_cast<int>(state.range(0));
  s.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(render(scene, Eye::left, s));
}
BENCHMARK(BM_RenderPlane)->Arg(1)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Fbm(benchmark::State& state) {
  NoiseSpec spec;
  spec.basis = static_cast<NoiseBasis>(state.range(0));
  spec.octaves = 6;
  const NoiseField field(spec);
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(field.fbm(Vec2(x, 0.37 * x)));
    x += 0.013;
  }
}
BENCHMARK(BM_Fbm)->DenseRange(0, 3);

void BM_DodSampled(benchmark::State& state) {
  DepthImage gt(640, 480);
  DepthImage pred(640, 480);
  CounterRng rng(3);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    gt[i] = rng.uniform(1.0, 30.0);
    pred[i] = gt[i] * rng.uniform(0.9, 1.1);
  }
  const ValidityMask mask = valid_mask(pred, gt);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dod(pred, gt, mask, 0.01, static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_DodSampled)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
