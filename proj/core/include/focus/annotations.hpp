#pragma once

#include "focus/eval_case.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace focus {

/// Reads a COCO instances document and emits one case per annotation whose
/// category name is in `targets`. `person_count` is the number of "person"
/// annotations on the same image. Boxes go from (x, y, w, h) to corner form,
/// widened to whole pixels and clamped to the image size.
///
/// Image paths resolve against `image_root` (default: the annotation
/// file's directory). Case ids are "<image id>-<annotation id>".
///
/// Throws AnnotationParseError (with line/column) for malformed JSON and
/// AnnotationSchemaError for structural problems such as unknown category
/// ids or empty boxes.
[[nodiscard]] std::vector<EvalCase> ingest_coco(const std::filesystem::path& annotation_file,
                                                const std::set<std::string>& targets,
                                                TaskTag task = TaskTag::granular(),
                                                std::optional<std::filesystem::path> image_root = {});

/// Reads every *.xml in `annotation_dir` (sorted by name) as a VOC
/// annotation document and emits one case per <object> whose <name> is in
/// `targets`. Image paths resolve against `image_root` (default: the
/// sibling JPEGImages directory). Case ids are "<file stem>-<object index>".
///
/// Throws AnnotationParseError for malformed XML and AnnotationSchemaError
/// for a missing <bndbox> or an empty box.
[[nodiscard]] std::vector<EvalCase> ingest_voc(const std::filesystem::path& annotation_dir,
                                               const std::set<std::string>& targets,
                                               TaskTag task = TaskTag::vehicles(),
                                               std::optional<std::filesystem::path> image_root = {});

/// JSON array of cases, one per line-free element; stable field order.
[[nodiscard]] std::string serialize_cases(const std::vector<EvalCase>& cases);
[[nodiscard]] std::vector<EvalCase> deserialize_cases(const std::string& text);

}  // namespace focus
