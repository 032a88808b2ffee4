#include <benchmark/benchmark.h>

#include "gazescreen/augment.hpp"
#include "gazescreen/events.hpp"
#include "gazescreen/model.hpp"
#include "gazescreen/render.hpp"
#include "gazescreen/simulate.hpp"

using namespace gazescreen;

namespace {

const GazeRecording& recording() {
    static const auto rec = simulate_recording(preset_profiles().at("anxious"), default_layout(), 10000.0, 120.0, 1);
    return rec;
}

const ScanPath& scanpath() {
    static const auto sp = build_scanpath(recording(), {}, {});
    return sp;
}

void BM_DetectFixations(benchmark::State& state) {
    const DetectionParams p;
    const ViewingGeometry g;
    for (auto _ : state) benchmark::DoNotOptimize(detect_fixations(recording(), p, g));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(recording().samples.size()));
}
BENCHMARK(BM_DetectFixations);

void BM_Render(benchmark::State& state) {
    RenderConfig cfg;
    cfg.style = state.range(0) == 0 ? RenderStyle::FixationOverlay : RenderStyle::RawPolyline;
    for (auto _ : state) benchmark::DoNotOptimize(render_scanpath(scanpath(), cfg));
}
BENCHMARK(BM_Render)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Augment(benchmark::State& state) {
    const auto img = render_scanpath(scanpath(), RenderConfig{});
    const auto& op = augmentation_bank().at(static_cast<std::size_t>(state.range(0)));
    state.SetLabel(op.name());
    for (auto _ : state) benchmark::DoNotOptimize(apply(op, img));
}
BENCHMARK(BM_Augment)->DenseRange(0, 8)->Unit(benchmark::kMillisecond);

void BM_ForwardTiny(benchmark::State& state) {
    ModelConfig cfg;
    cfg.depth = 8;
    cfg.width_multiplier = 0.25;
    cfg.input_size = static_cast<int>(state.range(0));
    const auto model = build_model(cfg, 1);
    RenderConfig rc;
    rc.output_size = cfg.input_size;
    const auto x = model.prepare_input(render_scanpath(scanpath(), rc));
    for (auto _ : state) benchmark::DoNotOptimize(model.logits(x));
}
BENCHMARK(BM_ForwardTiny)->Arg(64)->Arg(224)->Unit(benchmark::kMillisecond);

void BM_ForwardResNet18(benchmark::State& state) {
    ModelConfig cfg;
    cfg.depth = 18;
    const auto model = build_model(cfg, 1);
    const auto x = model.prepare_input(render_scanpath(scanpath(), RenderConfig{}));
    for (auto _ : state) benchmark::DoNotOptimize(model.logits(x));
}
BENCHMARK(BM_ForwardResNet18)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
