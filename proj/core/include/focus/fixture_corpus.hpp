#pragma once

#include "focus/proposal.hpp"
#include "focus/workspace.hpp"

#include <cstdint>
#include <filesystem>

namespace focus {

/// Alternate prompt asking for body parts instead of objects; the synthetic
/// corpus registers proposals for both prompts.
[[nodiscard]] TaskPrompt anatomy_prompt();

struct CorpusSummary {
    std::size_t coco_images = 0;
    std::size_t coco_cases = 0;
    std::size_t voc_images = 0;
    std::size_t voc_cases = 0;
};

/// Writes a small synthetic dataset plus matching mock-backend fixtures:
///
///   coco/instances.json, coco/images/*.png   person targets (granular task)
///   voc/Annotations/*.xml, voc/JPEGImages/*  car targets (vehicles task)
///   fixtures/{masks,proposals,detections}/   keyed by case id
///   config.json                              mock backends over fixtures/
///
/// Baseline ("full" view) detections are weaker copies of the isolated ones
/// plus distractors centred outside the region of interest, so containment
/// filtering removes them. The same seed always yields the same bytes.
CorpusSummary generate_corpus(const Workspace& workspace, const std::filesystem::path& out_dir,
                              std::uint64_t seed);

}  // namespace focus
