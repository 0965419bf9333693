#include "focus/bbox.hpp"
#include "focus/evaluation.hpp"
#include "focus/isolation.hpp"
#include "focus/proposal.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace focus;

RasterImage random_image(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
    for (auto& b : px) b = static_cast<std::uint8_t>(rng());
    return RasterImage(w, h, std::move(px));
}

void BM_ApplyMask(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const auto img = random_image(side, side, 1);
    const auto mask = rectangle_mask(side, side, BBox(side / 4, side / 4, 3 * side / 4, 3 * side / 4));
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_mask(img, mask, kBlack));
    }
    state.SetBytesProcessed(state.iterations() * side * side * 3);
}
BENCHMARK(BM_ApplyMask)->Arg(64)->Arg(512)->Arg(1024);

void BM_IsolateRegion(benchmark::State& state) {
    const auto mode = static_cast<IsolationMode>(state.range(0));
    const auto img = random_image(640, 480, 2);
    const BBox box(100, 80, 400, 420);
    const std::optional<BinaryMask> mask =
        mode == IsolationMode::SegmentMask ? std::optional(rectangle_mask(640, 480, box)) : std::nullopt;
    for (auto _ : state) {
        benchmark::DoNotOptimize(isolate_region(img, box, mask, mode));
    }
    state.SetLabel(std::string(to_string(mode)));
}
BENCHMARK(BM_IsolateRegion)->DenseRange(0, 3);

void BM_ParseProposal(benchmark::State& state) {
    std::string text;
    for (int i = 0; i < state.range(0); ++i) {
        text += std::to_string(i + 1) + ". Item Number " + std::to_string(i) + "s,\n";
    }
    const RawProposal raw{text, "bench"};
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_proposal(raw, LabelNormalization::FoldPlurals));
    }
}
BENCHMARK(BM_ParseProposal)->Arg(8)->Arg(64);

void BM_MatchLists(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::vector<std::string> truth, found;
    for (int i = 0; i < state.range(0); ++i) {
        truth.push_back("label" + std::to_string(rng() % 40));
        found.push_back("label" + std::to_string(rng() % 40));
    }
    const auto list = ProposalList::from_labels(truth);
    for (auto _ : state) {
        benchmark::DoNotOptimize(match_lists(list, found));
    }
}
BENCHMARK(BM_MatchLists)->Arg(12)->Arg(100);

void BM_Sweep(benchmark::State& state) {
    std::mt19937_64 rng(4);
    std::vector<MethodResults> methods = {{"baseline", {}}, {"focus", {}}};
    for (int i = 0; i < state.range(0); ++i) {
        std::vector<std::string> labels;
        for (int k = 0; k < 6; ++k) labels.push_back("l" + std::to_string(rng() % 20));
        const auto proposal = ProposalList::from_labels(labels);
        for (auto& m : methods) {
            std::vector<Detection> dets;
            for (int k = 0; k < 8; ++k) {
                dets.push_back({"l" + std::to_string(rng() % 20), static_cast<double>(rng() % 100) / 100.0,
                                BBox(0, 0, 4, 4)});
            }
            m.cases.push_back({std::to_string(i), TaskTag::granular(), static_cast<int>(rng() % 12), proposal,
                               std::move(dets)});
        }
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep(methods, kDefaultCutoffs, Aggregation::Macro,
                                       SweepGrouping::TaskAndDifficulty));
    }
}
BENCHMARK(BM_Sweep)->Arg(100)->Arg(1000);

}  // namespace
BENCHMARK_MAIN();
