// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "focus/annotations.hpp"
#include "focus/bbox.hpp"
#include "focus/errors.hpp"
#include "focus/evaluation.hpp"
#include "focus/image_io.hpp"
#include "focus/isolation.hpp"
#include "focus/pipeline.hpp"

#include "test_support.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <functional>
#include <iostream>
#include <random>

namespace {

using namespace focus;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Records the first failure; later checks still run so the detail is useful.
class Checker {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok && out_.pass) {
            out_.pass = false;
            out_.detail = what;
        }
        ++checks_;
    }
    Outcome finish(std::string note) {
        if (out_.pass) out_.detail = fmt::format("{} checks; {}", checks_, note);
        return out_;
    }
    [[nodiscard]] bool ok() const { return out_.pass; }

private:
    Outcome out_;
    std::size_t checks_ = 0;
};

Outcome within(Outcome o, Clock::time_point start, double limit_s) {
    const double s = std::chrono::duration<double>(Clock::now() - start).count();
    if (o.pass && s >= limit_s) {
        return {false, fmt::format("took {:.2f}s, limit {:.0f}s", s, limit_s)};
    }
    o.detail += fmt::format("; {:.2f}s", s);
    return o;
}

Outcome match_oracle() {
    const auto start = Clock::now();
    Checker c;
    std::mt19937_64 rng(1001);
    std::vector<std::string> alphabet;
    for (int i = 0; i < 20; ++i) alphabet.push_back(fmt::format("sym{:02}", i));
    auto draw = [&](std::size_t min_len) {
        std::vector<std::string> v(min_len + rng() % (13 - min_len));
        for (auto& s : v) s = alphabet[rng() % alphabet.size()];
        return v;
    };
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto truth = draw(1);
        const auto found = draw(0);
        const auto r = match_lists(ProposalList::from_labels(truth), found);
        const auto ref = testing::reference_match(truth, found);
        const double rec = static_cast<double>(ref.hits) / static_cast<double>(ref.truth);
        const double prec = ref.found == 0 ? 0.0 : static_cast<double>(ref.hits) / static_cast<double>(ref.found);
        c.expect(r.matched.size() == ref.hits, fmt::format("pair {}: hit count", i));
        c.expect(r.recall == rec, fmt::format("pair {}: recall {} vs {}", i, r.recall, rec));
        c.expect(r.precision == prec, fmt::format("pair {}: precision {} vs {}", i, r.precision, prec));
        const double err = std::abs(r.f1 - testing::reference_f1(ref));
        worst = std::max(worst, err);
        c.expect(err <= 1e-12, fmt::format("pair {}: F1 error {}", i, err));
    }
    return within(c.finish(fmt::format("max F1 error {:.1e}", worst)), start, 5.0);
}

Outcome mask_partition() {
    const auto start = Clock::now();
    Checker c;
    std::mt19937_64 rng(2002);
    for (int i = 0; i < 500 && c.ok(); ++i) {
        const int w = 1 + static_cast<int>(rng() % 64);
        const int h = 1 + static_cast<int>(rng() % 64);
        const auto img = testing::noise_image(w, h, rng());
        const auto mask = testing::noise_mask(w, h, rng());
        const Rgb fill{static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()),
                       static_cast<std::uint8_t>(rng())};
        const auto out = apply_mask(img, mask, fill);
        c.expect(out.width() == w && out.height() == h, fmt::format("image {}: size changed", i));
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const auto want = mask.at(x, y) ? img.at(x, y) : fill;
                if (out.at(x, y) != want) {
                    c.expect(false, fmt::format("image {}: pixel ({},{})", i, x, y));
                }
            }
        }
        const auto twice = apply_mask(out, mask, fill);
        c.expect(std::ranges::equal(twice.bytes(), out.bytes()), fmt::format("image {}: not idempotent", i));
    }
    return within(c.finish("500 images up to 64x64"), start, 10.0);
}

Outcome containment_oracle() {
    const auto start = Clock::now();
    Checker c;
    const BBox det(0, 0, 10, 10);
    const BBox region(5, 0, 15, 10);
    c.expect(ioa(det, region) == 0.5, fmt::format("worked case IoA {}", ioa(det, region)));
    c.expect(contains(region, det, ContainmentPolicy::ioa_at_least(0.5)), "worked case at theta 0.5");
    c.expect(!contains(region, det, ContainmentPolicy::ioa_at_least(0.51)), "worked case at theta 0.51");

    std::mt19937_64 rng(3003);
    auto box = [&] {
        const int x0 = static_cast<int>(rng() % 40);
        const int y0 = static_cast<int>(rng() % 40);
        return BBox(x0, y0, x0 + 1 + static_cast<int>(rng() % 30), y0 + 1 + static_cast<int>(rng() % 30));
    };
    const double thetas[] = {0.1, 0.25, 0.5, 0.6, 0.75, 1.0};
    for (int i = 0; i < 2000; ++i) {
        const auto r = box();
        const auto d = box();
        std::vector<ContainmentPolicy> policies = {ContainmentPolicy::center_in(), ContainmentPolicy::fully_inside(),
                                                   ContainmentPolicy::ioa_at_least(thetas[rng() % 6])};
        for (const auto& p : policies) {
            c.expect(contains(r, d, p) == testing::reference_contains(r, d, p),
                     fmt::format("pair {}: {} region {} det {}", i, p.to_string(), r.to_string(), d.to_string()));
        }
        const double ref_ioa =
            static_cast<double>(testing::reference_overlap_pixels(d, r)) / static_cast<double>(d.area());
        c.expect(std::abs(ioa(d, r) - ref_ioa) <= 1e-12, fmt::format("pair {}: IoA", i));
    }
    return within(c.finish("2000 pairs x 3 policies, IoA worked case 0.5"), start, 5.0);
}

Outcome cutoff_monotonicity() {
    const auto start = Clock::now();
    Checker c;
    // Score levels put a detection below, on, or between every cutoff.
    const double levels[] = {0.1, 0.2, 0.4, 0.6, 0.8, 0.9};
    const double grid[] = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    const auto truth = ProposalList::from_labels({"a", "b", "c"});
    const char* names[] = {"a", "b", "c", "z"};
    std::size_t sets = 0;
    // Every multiset of levels of size <= 8, as non-decreasing level indices.
    std::function<void(std::vector<int>&)> visit = [&](std::vector<int>& idx) {
        std::vector<Detection> d;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            d.push_back({names[(i * 3 + static_cast<std::size_t>(idx[i])) % 4], levels[idx[i]], BBox(0, 0, 1, 1)});
        }
        ++sets;
        for (double c1 : grid) {
            const auto low = filter_by_cutoff(d, c1);
            for (double c2 : grid) {
                if (c2 < c1) continue;
                const auto high = filter_by_cutoff(d, c2);
                // Order-preserving subsequence check.
                std::size_t j = 0;
                for (const auto& x : low) {
                    if (j < high.size() && high[j] == x) ++j;
                }
                c.expect(j == high.size(), fmt::format("set {}: cutoff {} not a subset of {}", sets, c2, c1));
            }
        }
        double prev = 2.0;
        for (double cut : kDefaultCutoffs) {
            std::vector<std::string> labels;
            for (const auto& x : filter_by_cutoff(d, cut)) labels.push_back(x.label);
            const double r = match_lists(truth, labels).recall;
            c.expect(r <= prev, fmt::format("set {}: recall rises at {}", sets, cut));
            prev = r;
        }
        if (idx.size() == 8) return;
        const int from = idx.empty() ? 0 : idx.back();
        for (int l = from; l < 6; ++l) {
            idx.push_back(l);
            visit(idx);
            idx.pop_back();
        }
    };
    std::vector<int> idx;
    visit(idx);
    return within(c.finish(fmt::format("{} detection sets", sets)), start, 60.0);
}

Outcome difficulty_partition() {
    Checker c;
    for (int p = 0; p <= 20; ++p) {
        const auto want = p <= 2 ? Difficulty::Easy : (p <= 7 ? Difficulty::Medium : Difficulty::Hard);
        c.expect(difficulty_of(p) == want, fmt::format("p={}", p));
    }
    c.expect(difficulty_of(2) == Difficulty::Easy, "p=2");
    c.expect(difficulty_of(3) == Difficulty::Medium, "p=3");
    c.expect(difficulty_of(7) == Difficulty::Medium, "p=7");
    c.expect(difficulty_of(8) == Difficulty::Hard, "p=8");
    return c.finish("p in [0, 20]");
}

Outcome golden_run() {
    const auto start = Clock::now();
    Checker c;
    testing::TempDir dir;
    const Workspace ws(dir / "ws");
    const auto corpus = testing::make_corpus(ws, 42);
    const auto images = nlohmann::json::parse(read_file_text(corpus / "coco" / "instances.json")).at("images").size();
    c.expect(images >= 10, fmt::format("corpus has {} images", images));
    const int rc = testing::eval_corpus(ws, corpus, "golden", 1);
    c.expect(rc == 0, fmt::format("eval exit code {}", rc));
    if (!c.ok()) return c.finish("");
    const auto actual = read_file_text(ws.reports() / "golden" / "sweep.csv");
    const auto expected = read_file_text(testing::golden_dir() / "seed42_sweep.csv");
    c.expect(actual == expected, "sweep.csv differs from the checked-in golden table");
    const auto sweep = nlohmann::json::parse(read_file_text(ws.reports() / "golden" / "sweep.json"));
    std::map<std::string, std::vector<double>> f1;
    for (const auto& row : sweep.at("rows")) {
        f1[row.at("method").get<std::string>() + "/" + row.at("task").get<std::string>()] =
            row.at("f1").get<std::vector<double>>();
    }
    const auto& focus = f1["focus/granular"];
    const auto& base = f1["baseline/granular"];
    c.expect(focus.size() == 4 && base.size() == 4, "missing sweep rows");
    for (std::size_t i = 0; i < std::min(focus.size(), base.size()); ++i) {
        c.expect(focus[i] >= base[i], fmt::format("cutoff {}: focus {} < baseline {}", kDefaultCutoffs[i],
                                                  focus[i], base[i]));
    }
    return within(c.finish(fmt::format("{} images, focus >= baseline at all cutoffs", images)), start, 60.0);
}

template <typename E, typename F>
bool raises(F&& f) {
    try {
        f();
    } catch (const E&) {
        return true;
    } catch (...) {
        return false;
    }
    return false;
}

Outcome annotation_ingestion() {
    Checker c;
    const auto data = testing::data_dir();
    const auto coco = ingest_coco(data / "coco_small" / "instances.json", {"person"});
    c.expect(coco.size() == 4, fmt::format("coco cases {}", coco.size()));
    if (coco.size() == 4) {
        c.expect(coco[0].input_box == BBox(10, 20, 40, 60), "coco box 10");
        c.expect(coco[1].input_box == BBox(100, 50, 121, 61), "coco box 11");
        c.expect(coco[2].input_box == BBox(630, 470, 640, 480), "coco box 13 (clamped)");
        c.expect(coco[3].input_box == BBox(0, 0, 100, 100), "coco box 20");
        c.expect(coco[0].person_count == 3 && coco[2].person_count == 3, "coco person count, image 1");
        c.expect(coco[3].person_count == 1, "coco person count, image 2");
    }
    const auto voc = ingest_voc(data / "voc_small" / "Annotations", {"car"});
    c.expect(voc.size() == 3, fmt::format("voc cases {}", voc.size()));
    if (voc.size() == 3) {
        c.expect(voc[0].input_box == BBox(48, 240, 195, 371), "voc 000001-0");
        c.expect(voc[1].input_box == BBox(300, 100, 421, 180), "voc 000001-2");
        c.expect(voc[2].input_box == BBox(150, 50, 200, 99), "voc 000002-1 (clamped)");
        c.expect(voc[0].person_count == 1 && voc[2].person_count == 0, "voc person counts");
    }
    const auto bad = data / "coco_bad";
    c.expect(raises<AnnotationParseError>([&] { (void)ingest_coco(bad / "truncated.json", {"person"}); }),
             "truncated COCO");
    for (const char* f : {"unknown_category.json", "unknown_image.json", "zero_area.json", "missing_annotations.json"}) {
        c.expect(raises<AnnotationSchemaError>([&] { (void)ingest_coco(bad / f, {"person"}); }), f);
    }
    c.expect(raises<AnnotationParseError>([&] { (void)ingest_voc(data / "voc_bad_xml" / "Annotations", {"car"}); }),
             "broken VOC XML");
    c.expect(
        raises<AnnotationSchemaError>([&] { (void)ingest_voc(data / "voc_no_bndbox" / "Annotations", {"car"}); }),
        "VOC object without bndbox");
    return c.finish("4 coco + 3 voc cases, 7 malformed fixtures rejected");
}

Outcome fuzz_closure() {
    Checker c;
    std::size_t injected = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto det = std::make_shared<testing::FuzzDetector>(seed * 7919);
        PipelineConfig cfg;
        cfg.mode = static_cast<IsolationMode>(seed % 4);
        cfg.base_tau = 0.05 * static_cast<double>(seed % 7);
        cfg.containment = seed % 2 == 0 ? ContainmentPolicy::center_in() : ContainmentPolicy::ioa_at_least(0.5);
        const Pipeline p(cfg, {std::make_shared<testing::FuzzSegmenter>(seed),
                               std::make_shared<testing::FuzzProposer>(seed), det});
        std::mt19937_64 rng(seed);
        const int w = 16 + static_cast<int>(rng() % 48);
        const int h = 16 + static_cast<int>(rng() % 48);
        const int x0 = static_cast<int>(rng() % static_cast<std::uint64_t>(w - 4));
        const int y0 = static_cast<int>(rng() % static_cast<std::uint64_t>(h - 4));
        const BBox box(x0, y0, x0 + 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(w - x0 - 1)),
                       y0 + 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(h - y0 - 1)));
        const auto img = testing::noise_image(w, h, seed);
        const auto subject = fmt::format("fuzz{}", seed);
        try {
            const auto r = seed % 4 == 3 ? p.run_baseline(img, box, subject) : p.run(img, box, subject);
            try {
                check_result_invariants(r, cfg.base_tau);
            } catch (const std::exception& e) {
                c.expect(false, fmt::format("seed {}: {}", seed, e.what()));
            }
            c.expect(r.diagnostics.dropped_detections == det->injected(),
                     fmt::format("seed {}: dropped {} injected {}", seed, r.diagnostics.dropped_detections,
                                 det->injected()));
            c.expect(r.detections.size() + r.diagnostics.outside_region == det->valid(),
                     fmt::format("seed {}: kept+outside != valid", seed));
            injected += det->injected();
        } catch (const std::exception& e) {
            c.expect(false, fmt::format("seed {} ({}): {}", seed, box.to_string(), e.what()));
        }
    }
    return c.finish(fmt::format("200 runs, {} injected violations dropped", injected));
}

Outcome determinism() {
    const auto start = Clock::now();
    Checker c;
    testing::TempDir dir;
    const Workspace ws(dir / "ws");
    const auto corpus = testing::make_corpus(ws, 42);
    c.expect(testing::eval_corpus(ws, corpus, "p1a", 1) == 0, "eval p1a");
    c.expect(testing::eval_corpus(ws, corpus, "p1b", 1) == 0, "eval p1b");
    c.expect(testing::eval_corpus(ws, corpus, "p4", 4) == 0, "eval p4");
    const auto a = testing::tree_digest(ws.reports() / "p1a");
    c.expect(a.size() >= 7, fmt::format("report has {} files", a.size()));
    c.expect(a == testing::tree_digest(ws.reports() / "p1b"), "repeat run at parallelism 1 differs");
    c.expect(a == testing::tree_digest(ws.reports() / "p4"), "parallelism 4 differs from 1");
    return within(c.finish(fmt::format("{} report files identical", a.size())), start, 120.0);
}

}  // namespace

int main() {
    const std::pair<const char*, Outcome (*)()> criteria[] = {
        {"match-oracle", match_oracle},
        {"mask-partition", mask_partition},
        {"containment-oracle", containment_oracle},
        {"cutoff-monotonicity", cutoff_monotonicity},
        {"difficulty-partition", difficulty_partition},
        {"golden-end-to-end", golden_run},
        {"annotation-ingestion", annotation_ingestion},
        {"fuzz-closure", fuzz_closure},
        {"determinism", determinism},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("uncaught: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << " - " << o.detail << std::endl;
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
