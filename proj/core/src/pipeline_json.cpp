#include "focus/pipeline_json.hpp"

namespace focus {

using nlohmann::json;

json box_json(const BBox& box) {
    return json::array({box.x_min(), box.y_min(), box.x_max(), box.y_max()});
}

json to_json(const PipelineResult& result, const ResultJsonOptions& options) {
    const auto& attended = *result.attended;
    json detections = json::array();
    for (const auto& d : result.detections) {
        detections.push_back({{"label", d.detection.label},
                              {"score", d.detection.score},
                              {"box", box_json(d.detection.box)},
                              {"original_box", box_json(d.original_box)}});
    }
    json doc = {
        {"schema", kPipelineResultSchema},
        {"image_id", result.image_id},
        {"variant", to_string(result.variant)},
        {"input_box", box_json(result.input_box)},
        {"attended",
         {{"mode", to_string(attended.mode)},
          {"width", attended.image.width()},
          {"height", attended.image.height()},
          {"offset", {attended.offset_x(), attended.offset_y()}},
          {"fill", {attended.fill.r, attended.fill.g, attended.fill.b}}}},
        {"labels_reused", result.labels_reused},
        {"proposal", result.proposal.labels()},
        {"detections", std::move(detections)},
        {"diagnostics",
         {{"dropped_detections", result.diagnostics.dropped_detections},
          {"outside_region", result.diagnostics.outside_region},
          {"retries",
           {{"segment", result.diagnostics.segment_retries},
            {"propose", result.diagnostics.propose_retries},
            {"detect", result.diagnostics.detect_retries}}}}},
    };
    if (!options.attended_path.empty()) {
        doc["attended"]["path"] = options.attended_path;
    }
    if (result.raw_proposal) {
        doc["raw_proposal"] = {{"text", result.raw_proposal->text}, {"source", result.raw_proposal->source}};
    } else {
        doc["raw_proposal"] = nullptr;
    }
    if (options.include_timings) {
        doc["stage_timings_us"] = {{"segment", result.timings.segment.count()},
                                   {"isolate", result.timings.isolate.count()},
                                   {"propose", result.timings.propose.count()},
                                   {"detect", result.timings.detect.count()}};
    }
    return doc;
}

json to_json(const CaseFailure& failure) {
    return {{"stage", to_string(failure.stage)}, {"kind", failure.kind}, {"message", failure.message}};
}

}  // namespace focus
