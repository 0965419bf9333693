#include "focus/annotations.hpp"

#include "focus/errors.hpp"
#include "focus/image_io.hpp"
#include "focus/proposal.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace focus {

namespace fs = std::filesystem;
using nlohmann::json;

TaskTag TaskTag::custom(std::string tag) {
    if (tag.empty()) {
        throw std::invalid_argument("custom task tag must not be empty");
    }
    return TaskTag(Kind::Custom, std::move(tag));
}

TaskTag TaskTag::parse(std::string_view text) {
    if (text == "granular") return granular();
    if (text == "vehicles") return vehicles();
    return custom(std::string(text));
}

std::string TaskTag::name() const {
    switch (kind_) {
        case Kind::Granular: return "granular";
        case Kind::Vehicles: return "vehicles";
        case Kind::Custom: return custom_;
    }
    return custom_;
}

void to_json(json& j, const EvalCase& c) {
    j = json{{"case_id", c.case_id},
             {"image_id", c.image_id},
             {"image_path", c.image_path.generic_string()},
             {"box", {c.input_box.x_min(), c.input_box.y_min(), c.input_box.x_max(), c.input_box.y_max()}},
             {"person_count", c.person_count},
             {"task", c.task.name()}};
}

EvalCase eval_case_from_json(const json& j) {
    try {
        const auto& b = j.at("box");
        if (!b.is_array() || b.size() != 4) {
            throw AnnotationSchemaError("case box must hold four integers");
        }
        return EvalCase{j.at("case_id").get<std::string>(),
                        j.at("image_id").get<std::string>(),
                        fs::path(j.at("image_path").get<std::string>()),
                        BBox(b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()),
                        j.at("person_count").get<int>(),
                        TaskTag::parse(j.at("task").get<std::string>())};
    } catch (const json::exception& e) {
        throw AnnotationSchemaError(std::string("malformed case record: ") + e.what());
    } catch (const InvalidBoxError& e) {
        throw AnnotationSchemaError(std::string("case record: ") + e.what());
    }
}

std::string serialize_cases(const std::vector<EvalCase>& cases) {
    json arr = json::array();
    for (const auto& c : cases) {
        arr.push_back(c);
    }
    return arr.dump(2) + "\n";
}

std::vector<EvalCase> deserialize_cases(const std::string& text) {
    json arr;
    try {
        arr = json::parse(text);
    } catch (const json::parse_error& e) {
        throw AnnotationParseError(e.what());
    }
    if (!arr.is_array()) {
        throw AnnotationSchemaError("case list must be a JSON array");
    }
    std::vector<EvalCase> out;
    for (const auto& j : arr) {
        out.push_back(eval_case_from_json(j));
    }
    return out;
}

namespace {

std::set<std::string> normalized_targets(const std::set<std::string>& targets) {
    std::set<std::string> out;
    for (const auto& t : targets) {
        if (auto n = try_normalize_label(t)) out.insert(*n);
    }
    return out;
}

std::string normalized_name(const std::string& name) {
    return try_normalize_label(name).value_or(std::string{});
}

// Smallest whole-pixel box covering [x0, x1) x [y0, y1), clamped to the image
// when its size is known.
BBox covering_box(double x0, double y0, double x1, double y1, std::optional<int> width,
                  std::optional<int> height, const std::string& where) {
    if (!std::isfinite(x0) || !std::isfinite(y0) || !std::isfinite(x1) || !std::isfinite(y1)) {
        throw AnnotationSchemaError(where + ": non-finite box coordinate");
    }
    auto xmin = static_cast<long>(std::floor(x0));
    auto ymin = static_cast<long>(std::floor(y0));
    auto xmax = static_cast<long>(std::ceil(x1));
    auto ymax = static_cast<long>(std::ceil(y1));
    xmin = std::max(xmin, 0L);
    ymin = std::max(ymin, 0L);
    if (width) xmax = std::min<long>(xmax, *width);
    if (height) ymax = std::min<long>(ymax, *height);
    try {
        return BBox(static_cast<int>(xmin), static_cast<int>(ymin), static_cast<int>(xmax),
                    static_cast<int>(ymax));
    } catch (const InvalidBoxError& e) {
        throw AnnotationSchemaError(where + ": " + e.what());
    }
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

std::string id_string(const json& id) {
    if (id.is_string()) return id.get<std::string>();
    if (id.is_number_integer()) return std::to_string(id.get<long long>());
    throw AnnotationSchemaError("ids must be integers or strings, got " + id.dump());
}

const json& require_array(const json& doc, const char* key) {
    const auto it = doc.find(key);
    if (it == doc.end() || !it->is_array()) {
        throw AnnotationSchemaError(fmt::format("COCO document lacks a '{}' array", key));
    }
    return *it;
}

struct CocoImage {
    std::string file_name;
    std::optional<int> width;
    std::optional<int> height;
    int persons = 0;
};

}  // namespace

std::vector<EvalCase> ingest_coco(const fs::path& annotation_file, const std::set<std::string>& targets,
                                  TaskTag task, std::optional<fs::path> image_root) {
    std::string text;
    try {
        text = read_file_text(annotation_file);
    } catch (const std::runtime_error& e) {
        throw AnnotationParseError(e.what());
    }
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw AnnotationParseError(fmt::format("{}:{}:{}: {}", annotation_file.string(), line, col, e.what()));
    }
    if (!doc.is_object()) {
        throw AnnotationParseError(annotation_file.string() + ": top level is not a JSON object");
    }
    const auto root = image_root.value_or(annotation_file.parent_path());
    const auto wanted = normalized_targets(targets);

    try {
        std::map<std::string, std::string> categories;
        for (const auto& c : require_array(doc, "categories")) {
            categories[id_string(c.at("id"))] = normalized_name(c.at("name").get<std::string>());
        }
        std::map<std::string, CocoImage> images;
        for (const auto& im : require_array(doc, "images")) {
            CocoImage info{im.at("file_name").get<std::string>(), std::nullopt, std::nullopt, 0};
            if (im.contains("width")) info.width = im.at("width").get<int>();
            if (im.contains("height")) info.height = im.at("height").get<int>();
            images[id_string(im.at("id"))] = std::move(info);
        }
        const auto& annotations = require_array(doc, "annotations");

        auto category_of = [&](const json& a) -> const std::string& {
            const auto id = id_string(a.at("category_id"));
            const auto it = categories.find(id);
            if (it == categories.end()) {
                throw AnnotationSchemaError(fmt::format("annotation {} references unknown category id {}",
                                                        a.at("id").dump(), id));
            }
            return it->second;
        };
        auto image_of = [&](const json& a) -> CocoImage& {
            const auto id = id_string(a.at("image_id"));
            const auto it = images.find(id);
            if (it == images.end()) {
                throw AnnotationSchemaError(fmt::format("annotation {} references unknown image id {}",
                                                        a.at("id").dump(), id));
            }
            return it->second;
        };

        for (const auto& a : annotations) {
            if (category_of(a) == "person") {
                ++image_of(a).persons;
            }
        }

        std::vector<EvalCase> cases;
        for (const auto& a : annotations) {
            if (!wanted.contains(category_of(a))) {
                continue;
            }
            const auto& image = image_of(a);
            const auto image_id = id_string(a.at("image_id"));
            const auto ann_id = id_string(a.at("id"));
            const auto& bbox = a.at("bbox");
            if (!bbox.is_array() || bbox.size() != 4) {
                throw AnnotationSchemaError("annotation " + ann_id + ": bbox must hold four numbers");
            }
            const double x = bbox[0].get<double>();
            const double y = bbox[1].get<double>();
            const double w = bbox[2].get<double>();
            const double h = bbox[3].get<double>();
            if (!(w > 0.0) || !(h > 0.0)) {
                throw AnnotationSchemaError("annotation " + ann_id + ": bbox has no area");
            }
            cases.push_back(EvalCase{
                image_id + "-" + ann_id, image_id, root / image.file_name,
                covering_box(x, y, x + w, y + h, image.width, image.height, "annotation " + ann_id),
                image.persons, task});
        }
        return cases;
    } catch (const json::exception& e) {
        throw AnnotationSchemaError(annotation_file.string() + ": " + e.what());
    }
}

namespace {

namespace pt = boost::property_tree;

double voc_number(const pt::ptree& node, const char* key, const std::string& where) {
    const auto value = node.get_optional<std::string>(key);
    if (!value) {
        throw AnnotationSchemaError(fmt::format("{}: missing <{}>", where, key));
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(*value, &used);
        if (used != value->size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::logic_error&) {
        throw AnnotationSchemaError(fmt::format("{}: <{}> is not a number: '{}'", where, key, *value));
    }
}

}  // namespace

std::vector<EvalCase> ingest_voc(const fs::path& annotation_dir, const std::set<std::string>& targets,
                                 TaskTag task, std::optional<fs::path> image_root) {
    if (!fs::is_directory(annotation_dir)) {
        throw AnnotationParseError(annotation_dir.string() + " is not a directory");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(annotation_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".xml") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    const auto root = image_root.value_or(annotation_dir.parent_path() / "JPEGImages");
    const auto wanted = normalized_targets(targets);

    std::vector<EvalCase> cases;
    for (const auto& file : files) {
        pt::ptree tree;
        try {
            pt::read_xml(file.string(), tree, pt::xml_parser::trim_whitespace);
        } catch (const pt::xml_parser_error& e) {
            throw AnnotationParseError(fmt::format("{}:{}: {}", file.string(), e.line(), e.message()));
        }
        const auto doc = tree.get_child_optional("annotation");
        if (!doc) {
            throw AnnotationSchemaError(file.string() + ": missing <annotation> root");
        }
        const auto stem = file.stem().string();
        const auto filename = doc->get<std::string>("filename", stem + ".jpg");
        std::optional<int> width;
        std::optional<int> height;
        if (const auto size = doc->get_child_optional("size")) {
            width = static_cast<int>(voc_number(*size, "width", file.string()));
            height = static_cast<int>(voc_number(*size, "height", file.string()));
        }

        std::vector<const pt::ptree*> objects;
        for (const auto& [key, child] : *doc) {
            if (key == "object") objects.push_back(&child);
        }
        int persons = 0;
        for (const auto* obj : objects) {
            if (normalized_name(obj->get<std::string>("name", "")) == "person") ++persons;
        }
        for (std::size_t i = 0; i < objects.size(); ++i) {
            const auto& obj = *objects[i];
            const auto name = normalized_name(obj.get<std::string>("name", ""));
            if (!wanted.contains(name)) {
                continue;
            }
            const auto where = fmt::format("{} object {}", file.string(), i);
            const auto bnd = obj.get_child_optional("bndbox");
            if (!bnd) {
                throw AnnotationSchemaError(where + ": missing <bndbox>");
            }
            const double x0 = voc_number(*bnd, "xmin", where);
            const double y0 = voc_number(*bnd, "ymin", where);
            const double x1 = voc_number(*bnd, "xmax", where);
            const double y1 = voc_number(*bnd, "ymax", where);
            if (!(x0 < x1) || !(y0 < y1)) {
                throw AnnotationSchemaError(fmt::format("{}: empty box ({},{},{},{})", where, x0, y0, x1, y1));
            }
            cases.push_back(EvalCase{fmt::format("{}-{}", stem, i), stem, root / filename,
                                     covering_box(x0, y0, x1, y1, width, height, where), persons, task});
        }
    }
    return cases;
}

}  // namespace focus
