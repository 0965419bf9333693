#include "focus/fixture_corpus.hpp"

#include "focus/bbox.hpp"
#include "focus/image_io.hpp"
#include "focus/isolation.hpp"
#include "focus/mock_backend.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <random>
#include <vector>

namespace focus {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// std distributions are implementation-defined; these draws are not.
class CorpusRng {
public:
    explicit CorpusRng(std::uint64_t seed) : engine_(seed) {}

    int between(int lo, int hi) {
        return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool chance(double p) { return unit() < p; }
    /// Two-decimal score in [lo, hi] (hundredths).
    double score(int lo, int hi) { return between(lo, hi) / 100.0; }

private:
    std::mt19937_64 engine_;
};

const std::vector<std::string> kGranularVocab = {
    "belt",  "watch",   "jacket", "shoe",     "hat",      "glasses", "backpack",
    "scarf", "glove",   "sleeve", "collar",   "button",   "pocket",  "necklace",
    "earring", "bracelet", "tie", "sock",     "headphones", "umbrella"};

const std::vector<std::string> kAnatomyVocab = {"head", "hand", "arm", "leg", "foot", "ear",
                                                "nose", "eye", "shoulder", "neck"};

const std::vector<std::string> kVehicleVocab = {"wheel",  "headlight", "mirror",     "door",
                                                "window", "bumper",    "license plate", "tire",
                                                "windshield", "grille"};

struct Canvas {
    int width;
    int height;
    std::vector<std::uint8_t> pixels;

    Canvas(int w, int h, Rgb bg) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3) {
        fill(BBox::frame(w, h), bg);
    }
    void fill(const BBox& b, Rgb c) {
        for (int y = b.y_min(); y < b.y_max(); ++y) {
            for (int x = b.x_min(); x < b.x_max(); ++x) {
                const auto i = (static_cast<std::size_t>(y) * width + x) * 3;
                pixels[i] = c.r;
                pixels[i + 1] = c.g;
                pixels[i + 2] = c.b;
            }
        }
    }
    RasterImage image() const { return {width, height, pixels}; }
};

Rgb random_colour(CorpusRng& rng) {
    return {static_cast<std::uint8_t>(rng.between(0, 255)), static_cast<std::uint8_t>(rng.between(0, 255)),
            static_cast<std::uint8_t>(rng.between(0, 255))};
}

BBox random_box(CorpusRng& rng, int width, int height, int min_w, int max_w, int min_h, int max_h) {
    const int w = rng.between(min_w, std::min(max_w, width));
    const int h = rng.between(min_h, std::min(max_h, height));
    const int x = rng.between(0, width - w);
    const int y = rng.between(0, height - h);
    return {x, y, x + w, y + h};
}

BinaryMask ellipse_mask(int width, int height, const BBox& box) {
    BinaryMask mask(width, height);
    const double cx = (box.x_min() + box.x_max()) / 2.0;
    const double cy = (box.y_min() + box.y_max()) / 2.0;
    const double rx = box.width() / 2.0;
    const double ry = box.height() / 2.0;
    for (int y = box.y_min(); y < box.y_max(); ++y) {
        for (int x = box.x_min(); x < box.x_max(); ++x) {
            const double dx = (x + 0.5 - cx) / rx;
            const double dy = (y + 0.5 - cy) / ry;
            mask.set(x, y, dx * dx + dy * dy <= 1.0);
        }
    }
    return mask;
}

std::vector<std::string> pick_labels(CorpusRng& rng, const std::vector<std::string>& vocab, int n) {
    std::vector<std::string> pool = vocab;
    std::vector<std::string> out;
    for (int i = 0; i < n && !pool.empty(); ++i) {
        const auto k = static_cast<std::size_t>(rng.between(0, static_cast<int>(pool.size()) - 1));
        out.push_back(pool[k]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return out;
}

std::string capitalised(std::string s) {
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

// Renders a label list in one of several styles a VLM might produce.
std::string render_proposal(CorpusRng& rng, const std::vector<std::string>& labels) {
    std::string out;
    const int style = rng.between(0, 3);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto label = rng.chance(0.3) ? capitalised(labels[i]) : labels[i];
        switch (style) {
            case 0: out += (i ? ", " : "") + label; break;
            case 1: out += fmt::format("{}{}. {}", i ? "\n" : "", i + 1, label); break;
            case 2: out += fmt::format("{}- {}", i ? "\n" : "", label); break;
            default: out += (i ? "; " : "") + label + (i + 1 == labels.size() ? "." : ""); break;
        }
    }
    return out;
}

json detection_json(const std::string& label, double score, const BBox& b) {
    return {{"label", label}, {"score", score}, {"box", {b.x_min(), b.y_min(), b.x_max(), b.y_max()}}};
}

struct CaseFixture {
    std::string case_id;
    int width;
    int height;
    BBox box;
    const std::vector<std::string>* vocab;
};

void write_case_fixtures(const Workspace& ws, const fs::path& fixtures, CorpusRng& rng,
                         const CaseFixture& c) {
    ws.write_bytes(fixtures / "masks" / (c.case_id + ".png"),
                   encode_mask_png(ellipse_mask(c.width, c.height, c.box)));

    const auto labels = pick_labels(rng, *c.vocab, rng.between(3, 6));
    const auto anatomy = pick_labels(rng, kAnatomyVocab, rng.between(2, 5));
    const json proposals = {{prompt_digest(build_prompt(default_prompt())), render_proposal(rng, labels)},
                            {prompt_digest(build_prompt(anatomy_prompt())), render_proposal(rng, anatomy)}};
    ws.write_text(fixtures / "proposals" / (c.case_id + ".json"), proposals.dump(2) + "\n");

    json attended = json::array();
    json full = json::array();
    for (const auto& label : labels) {
        if (!rng.chance(0.85)) {
            continue;
        }
        const double focus_score = rng.score(30, 97);
        const auto local = random_box(rng, c.box.width(), c.box.height(), 2, 24, 2, 24);
        attended.push_back(detection_json(label, focus_score, local));
        if (rng.chance(0.8)) {
            // Same object seen in the cluttered full frame: weaker evidence.
            const double factor = rng.score(35, 90);
            const double baseline_score = static_cast<int>(focus_score * factor * 100.0) / 100.0;
            full.push_back(detection_json(label, baseline_score,
                                          local.translated(c.box.x_min(), c.box.y_min())));
        }
    }
    // Out-of-contract noise the adapter has to drop.
    if (rng.chance(0.2)) {
        attended.push_back(detection_json("traffic cone", 0.6, BBox(0, 0, 1, 1)));
    }
    if (rng.chance(0.2) && !labels.empty()) {
        attended.push_back(detection_json(labels.front(), 0.04, BBox(0, 0, 1, 1)));
    }
    // Matching objects belonging to other things in the scene.
    const int distractors = rng.between(1, 3);
    for (int i = 0; i < distractors; ++i) {
        const auto& label = labels[static_cast<std::size_t>(rng.between(0, static_cast<int>(labels.size()) - 1))];
        for (int attempt = 0; attempt < 40; ++attempt) {
            const auto b = random_box(rng, c.width, c.height, 4, 14, 4, 14);
            if (!contains(c.box, b, ContainmentPolicy::center_in())) {
                full.push_back(detection_json(label, rng.score(45, 95), b));
                break;
            }
        }
    }
    const json doc = {{"detections", attended}, {"views", {{"attended", attended}, {"full", full}}}};
    ws.write_text(fixtures / "detections" / (c.case_id + ".json"), doc.dump(2) + "\n");
}

Canvas draw_scene(CorpusRng& rng, int width, int height, const std::vector<BBox>& subjects) {
    Canvas canvas(width, height, random_colour(rng));
    for (int i = 0; i < 8; ++i) {
        canvas.fill(random_box(rng, width, height, 8, 48, 8, 48), random_colour(rng));
    }
    for (const auto& s : subjects) {
        canvas.fill(s, random_colour(rng));
        for (int i = 0; i < 3; ++i) {
            const auto part = random_box(rng, s.width(), s.height(), 2, 10, 2, 10);
            canvas.fill(part.translated(s.x_min(), s.y_min()), random_colour(rng));
        }
    }
    return canvas;
}

}  // namespace

TaskPrompt anatomy_prompt() {
    return {"Identify and list every visible body part of the subject in the image.",
            default_prompt().addendum};
}

CorpusSummary generate_corpus(const Workspace& ws, const fs::path& out_dir, std::uint64_t seed) {
    const auto root = ws.confine(out_dir, ws.root());
    const auto fixtures = root / "fixtures";
    CorpusRng rng(seed);
    CorpusSummary summary;

    // COCO-style person scenes. The first four images pin one scene per
    // difficulty boundary; the rest are random.
    constexpr int kCocoImages = 12;
    const int pinned_counts[] = {1, 3, 8, 2};
    json images = json::array();
    json annotations = json::array();
    int next_ann = 1;
    for (int i = 0; i < kCocoImages; ++i) {
        const int image_id = 100 + i;
        const int width = rng.between(16, 24) * 8;
        const int height = rng.between(16, 24) * 8;
        const int persons = i < 4 ? pinned_counts[i] : rng.between(1, 9);
        std::vector<BBox> boxes;
        for (int p = 0; p < persons; ++p) {
            boxes.push_back(random_box(rng, width, height, 14, 32, 24, 56));
        }
        const auto canvas = draw_scene(rng, width, height, boxes);
        const auto file_name = fmt::format("images/scene_{:03}.png", i);
        ws.write_bytes(root / "coco" / file_name, encode_png(canvas.image()));
        images.push_back({{"id", image_id}, {"file_name", file_name}, {"width", width}, {"height", height}});

        for (const auto& b : boxes) {
            const int ann_id = next_ann++;
            annotations.push_back({{"id", ann_id},
                                   {"image_id", image_id},
                                   {"category_id", 1},
                                   {"bbox", {b.x_min(), b.y_min(), b.width(), b.height()}},
                                   {"area", b.area()},
                                   {"iscrowd", 0}});
            write_case_fixtures(ws, fixtures, rng,
                                {fmt::format("{}-{}", image_id, ann_id), width, height, b, &kGranularVocab});
            ++summary.coco_cases;
        }
        if (rng.chance(0.5)) {
            const auto bag = random_box(rng, width, height, 6, 16, 6, 16);
            annotations.push_back({{"id", next_ann++},
                                   {"image_id", image_id},
                                   {"category_id", 27},
                                   {"bbox", {bag.x_min(), bag.y_min(), bag.width(), bag.height()}},
                                   {"area", bag.area()},
                                   {"iscrowd", 0}});
        }
        ++summary.coco_images;
    }
    const json coco = {{"info", {{"description", fmt::format("synthetic corpus, seed {}", seed)}}},
                       {"images", images},
                       {"annotations", annotations},
                       {"categories",
                        {{{"id", 1}, {"name", "person"}, {"supercategory", "person"}},
                         {{"id", 3}, {"name", "car"}, {"supercategory", "vehicle"}},
                         {{"id", 27}, {"name", "backpack"}, {"supercategory", "accessory"}}}}};
    ws.write_text(root / "coco" / "instances.json", coco.dump(2) + "\n");

    // VOC-style street scenes with car targets.
    constexpr int kVocImages = 4;
    for (int i = 0; i < kVocImages; ++i) {
        const auto stem = fmt::format("street_{:03}", i);
        const int width = rng.between(20, 28) * 8;
        const int height = rng.between(14, 20) * 8;
        const int cars = rng.between(1, 3);
        const int people = rng.between(0, 3);
        std::vector<std::pair<std::string, BBox>> objects;
        for (int k = 0; k < cars; ++k) {
            objects.emplace_back("car", random_box(rng, width, height, 30, 64, 18, 36));
        }
        for (int k = 0; k < people; ++k) {
            objects.emplace_back("person", random_box(rng, width, height, 8, 16, 20, 40));
        }
        std::vector<BBox> boxes;
        for (const auto& [_, b] : objects) boxes.push_back(b);
        const auto canvas = draw_scene(rng, width, height, boxes);
        ws.write_bytes(root / "voc" / "JPEGImages" / (stem + ".png"), encode_png(canvas.image()));

        std::string xml = fmt::format(
            "<annotation>\n  <folder>VOC</folder>\n  <filename>{}.png</filename>\n"
            "  <size>\n    <width>{}</width>\n    <height>{}</height>\n    <depth>3</depth>\n  </size>\n",
            stem, width, height);
        for (std::size_t k = 0; k < objects.size(); ++k) {
            const auto& [name, b] = objects[k];
            xml += fmt::format(
                "  <object>\n    <name>{}</name>\n    <difficult>0</difficult>\n    <bndbox>\n"
                "      <xmin>{}</xmin>\n      <ymin>{}</ymin>\n      <xmax>{}</xmax>\n      <ymax>{}</ymax>\n"
                "    </bndbox>\n  </object>\n",
                name, b.x_min(), b.y_min(), b.x_max(), b.y_max());
            if (name == "car") {
                write_case_fixtures(ws, fixtures, rng,
                                    {fmt::format("{}-{}", stem, k), width, height, b, &kVehicleVocab});
                ++summary.voc_cases;
            }
        }
        xml += "</annotation>\n";
        ws.write_text(root / "voc" / "Annotations" / (stem + ".xml"), xml);
        ++summary.voc_images;
    }

    const json config = {
        {"mode", "segment_mask"},
        {"base_tau", 0.1},
        {"containment", "center_in"},
        {"parallelism", 1},
        {"backends",
         {{"segmenter", {{"kind", "mock"}, {"fixtures", "fixtures"}, {"mask_source", "fixture"}}},
          {"proposer", {{"kind", "mock"}, {"fixtures", "fixtures"}}},
          {"detector", {{"kind", "mock"}, {"fixtures", "fixtures"}}}}}};
    ws.write_text(root / "config.json", config.dump(2) + "\n");
    return summary;
}

}  // namespace focus
