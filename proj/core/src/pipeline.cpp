#include "focus/pipeline.hpp"

#include "focus/image_io.hpp"

#include <algorithm>
#include <atomic>
#include <fmt/format.h>
#include <thread>

namespace focus {

namespace {

using Clock = std::chrono::steady_clock;

std::chrono::microseconds since(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start);
}

// Runs `f`, re-raising anything it throws as a StageError for `stage`.
template <typename F>
auto in_stage(Stage stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, std::current_exception(), e.what());
    }
}

std::string view_name(IsolationMode mode) {
    return mode == IsolationMode::Full ? "full" : "attended";
}

}  // namespace

void PipelineConfig::validate() const {
    if (!(base_tau >= 0.0 && base_tau <= 1.0)) {
        throw ConfigError(fmt::format("base_tau {} outside [0, 1]", base_tau));
    }
    if (parallelism < 1) {
        throw ConfigError(fmt::format("parallelism must be >= 1, got {}", parallelism));
    }
    try {
        (void)build_prompt(prompt);
    } catch (const EmptyPromptError& e) {
        throw ConfigError(e.what());
    }
}

std::string_view to_string(Variant variant) {
    return variant == Variant::Focus ? "focus" : "baseline";
}

Variant parse_variant(std::string_view text) {
    if (text == "focus") return Variant::Focus;
    if (text == "baseline") return Variant::Baseline;
    throw std::invalid_argument(fmt::format("unknown variant '{}' (expected focus or baseline)", text));
}

Pipeline::Pipeline(PipelineConfig config, BackendSet backends)
    : config_(std::move(config)), backends_(std::move(backends)) {
    config_.validate();
    if (!backends_.proposer) {
        throw ConfigError("no proposer backend configured");
    }
    if (!backends_.detector) {
        throw ConfigError("no detector backend configured");
    }
    if (config_.mode == IsolationMode::SegmentMask && !backends_.segmenter) {
        throw ConfigError("segment_mask isolation needs a segmenter backend");
    }
}

std::shared_ptr<const AttendedImage> Pipeline::isolate(const RasterImage& image, const BBox& box,
                                                       const std::string& subject,
                                                       Trace& trace) const {
    std::optional<BinaryMask> mask;
    if (config_.mode == IsolationMode::SegmentMask) {
        const auto start = Clock::now();
        CallContext ctx{subject, "full", 0};
        mask = in_stage(Stage::Segment, [&] {
            try {
                return segment(*backends_.segmenter, image, box, ctx);
            } catch (...) {
                trace.diagnostics.segment_retries += ctx.retries;
                throw;
            }
        });
        trace.diagnostics.segment_retries += ctx.retries;
        trace.timings.segment = since(start);
    }
    const auto start = Clock::now();
    auto attended = in_stage(Stage::Isolate, [&] {
        return std::make_shared<const AttendedImage>(
            isolate_region(image, box, mask, config_.mode, config_.fill));
    });
    trace.timings.isolate = since(start);
    return attended;
}

Pipeline::Proposed Pipeline::propose_stage(const RasterImage& image, const BBox& box,
                                           const std::string& subject, Trace& trace) const {
    auto attended = isolate(image, box, subject, trace);
    const auto start = Clock::now();
    CallContext ctx{subject, view_name(config_.mode), 0};
    auto raw = in_stage(Stage::Propose, [&] {
        try {
            return propose(*backends_.proposer, attended->image, build_prompt(config_.prompt), ctx);
        } catch (...) {
            trace.diagnostics.propose_retries += ctx.retries;
            throw;
        }
    });
    trace.diagnostics.propose_retries += ctx.retries;
    auto list = in_stage(Stage::Propose, [&] { return parse_proposal(raw, config_.normalization); });
    trace.timings.propose = since(start);
    return {std::move(attended), std::move(raw), std::move(list)};
}

std::vector<LocatedDetection> Pipeline::detect_stage(const AttendedImage& attended,
                                                     const ProposalList& labels,
                                                     const std::string& subject,
                                                     Trace& trace) const {
    const auto start = Clock::now();
    CallContext ctx{subject, view_name(attended.mode), 0};
    auto outcome = in_stage(Stage::Detect, [&] {
        try {
            return detect(*backends_.detector, attended.image, labels, config_.base_tau, ctx,
                          config_.normalization);
        } catch (...) {
            trace.diagnostics.detect_retries += ctx.retries;
            throw;
        }
    });
    trace.diagnostics.detect_retries += ctx.retries;
    trace.diagnostics.dropped_detections += outcome.dropped;
    std::vector<LocatedDetection> located;
    located.reserve(outcome.detections.size());
    for (auto& det : outcome.detections) {
        const auto original = attended.to_original(det.box);
        located.push_back({std::move(det), original});
    }
    trace.timings.detect = since(start);
    return located;
}

PipelineResult Pipeline::run(const RasterImage& image, const BBox& box,
                             const std::string& subject) const {
    in_stage(Stage::Input, [&] { box.require_within(image.width(), image.height()); });
    Trace trace;
    auto proposed = propose_stage(image, box, subject, trace);
    auto detections = detect_stage(*proposed.attended, proposed.list, subject, trace);
    return PipelineResult{subject,
                          Variant::Focus,
                          box,
                          std::move(proposed.attended),
                          std::move(proposed.raw),
                          std::move(proposed.list),
                          false,
                          std::move(detections),
                          trace.timings,
                          trace.diagnostics};
}

PipelineResult Pipeline::run_with_labels(const RasterImage& image, const BBox& box,
                                         const ProposalList& labels,
                                         const std::string& subject) const {
    in_stage(Stage::Input, [&] { box.require_within(image.width(), image.height()); });
    Trace trace;
    auto attended = isolate(image, box, subject, trace);
    auto detections = detect_stage(*attended, labels, subject, trace);
    return PipelineResult{subject,        Variant::Focus, box,
                          std::move(attended), std::nullopt, labels,
                          true,           std::move(detections), trace.timings,
                          trace.diagnostics};
}

PipelineResult Pipeline::baseline_with(const RasterImage& image, const BBox& box,
                                       ProposalList labels, std::optional<RawProposal> raw,
                                       bool reused, const std::string& subject, Trace trace) const {
    auto full = std::make_shared<const AttendedImage>(
        AttendedImage{image, IsolationMode::Full, box, config_.fill});
    auto detections = detect_stage(*full, labels, subject, trace);
    const auto before = detections.size();
    std::erase_if(detections, [&](const LocatedDetection& d) {
        return !contains(box, d.original_box, config_.containment);
    });
    trace.diagnostics.outside_region = before - detections.size();
    return PipelineResult{subject,         Variant::Baseline, box,
                          std::move(full), std::move(raw),    std::move(labels),
                          reused,          std::move(detections), trace.timings,
                          trace.diagnostics};
}

PipelineResult Pipeline::run_baseline(const RasterImage& image, const BBox& box,
                                      const ProposalList& labels,
                                      const std::string& subject) const {
    in_stage(Stage::Input, [&] { box.require_within(image.width(), image.height()); });
    return baseline_with(image, box, labels, std::nullopt, true, subject, Trace{});
}

PipelineResult Pipeline::run_baseline(const RasterImage& image, const BBox& box,
                                      const std::string& subject) const {
    in_stage(Stage::Input, [&] { box.require_within(image.width(), image.height()); });
    Trace trace;
    auto proposed = propose_stage(image, box, subject, trace);
    return baseline_with(image, box, std::move(proposed.list), std::move(proposed.raw), false,
                         subject, trace);
}

CaseOutcome Pipeline::run_case(const EvalCase& c, Variant variant, const LabelBook* reuse) const {
    try {
        const auto image = in_stage(Stage::Input, [&] { return read_image(c.image_path); });
        if (variant == Variant::Focus) {
            return {c.case_id, run(image, c.input_box, c.case_id)};
        }
        if (reuse != nullptr) {
            if (auto it = reuse->find(c.case_id); it != reuse->end()) {
                return {c.case_id, run_baseline(image, c.input_box, it->second, c.case_id)};
            }
        }
        return {c.case_id, run_baseline(image, c.input_box, c.case_id)};
    } catch (const StageError& e) {
        return {c.case_id, CaseFailure{e.stage(), e.kind(), e.what()}};
    } catch (const std::exception& e) {
        return {c.case_id, CaseFailure{Stage::Input, error_kind(std::current_exception()), e.what()}};
    }
}

std::vector<CaseOutcome> Pipeline::batch_run(std::span<const EvalCase> cases, Variant variant,
                                             const LabelBook* reuse) const {
    std::vector<std::optional<CaseOutcome>> slots(cases.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (auto i = next.fetch_add(1); i < cases.size(); i = next.fetch_add(1)) {
            slots[i].emplace(run_case(cases[i], variant, reuse));
        }
    };
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config_.parallelism),
                                               cases.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t i = 0; i < workers; ++i) {
            pool.emplace_back(worker);
        }
    }
    std::vector<CaseOutcome> out;
    out.reserve(slots.size());
    for (auto& slot : slots) {
        out.push_back(*std::move(slot));
    }
    return out;
}

void check_result_invariants(const PipelineResult& result, double base_tau) {
    const auto& image = result.attended->image;
    for (const auto& d : result.detections) {
        if (!result.proposal.contains(d.detection.label)) {
            throw Error("label closure violated: '" + d.detection.label + "' not proposed");
        }
        if (d.detection.score < base_tau) {
            throw Error(fmt::format("threshold closure violated: {} < {}", d.detection.score, base_tau));
        }
        if (!d.detection.box.fits_within(image.width(), image.height())) {
            throw Error("detection box " + d.detection.box.to_string() + " leaves the attended image");
        }
        if (result.attended->to_attended(d.original_box) != d.detection.box) {
            throw Error("coordinate round-trip violated for " + d.detection.box.to_string());
        }
    }
}

}  // namespace focus
