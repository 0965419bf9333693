#pragma once

#include "focus/bbox.hpp"

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace focus {

/// Task family a case belongs to; rows of a sweep table are grouped by it.
class TaskTag {
public:
    enum class Kind { Granular, Vehicles, Custom };

    static TaskTag granular() { return TaskTag(Kind::Granular, {}); }
    static TaskTag vehicles() { return TaskTag(Kind::Vehicles, {}); }
    /// Throws std::invalid_argument for an empty tag.
    static TaskTag custom(std::string tag);
    /// "granular", "vehicles", anything else becomes a custom tag.
    static TaskTag parse(std::string_view text);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] std::string name() const;

    friend bool operator==(const TaskTag&, const TaskTag&) = default;
    friend auto operator<=>(const TaskTag& a, const TaskTag& b) { return a.name() <=> b.name(); }

private:
    TaskTag(Kind kind, std::string custom) : kind_(kind), custom_(std::move(custom)) {}

    Kind kind_;
    std::string custom_;
};

/// One evaluation query: an image, the user's region of interest inside it
/// and how crowded the scene is.
struct EvalCase {
    /// Unique within a dataset; also the fixture key for mock backends.
    std::string case_id;
    std::string image_id;
    std::filesystem::path image_path;
    BBox input_box;
    int person_count = 0;
    TaskTag task = TaskTag::granular();

    friend bool operator==(const EvalCase&, const EvalCase&) = default;
};

void to_json(nlohmann::json& j, const EvalCase& c);
/// Throws AnnotationSchemaError on missing fields or an invalid box.
EvalCase eval_case_from_json(const nlohmann::json& j);

}  // namespace focus
