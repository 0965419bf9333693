#include "focus/commands.hpp"

#include "focus/annotations.hpp"
#include "focus/codec.hpp"
#include "focus/fixture_corpus.hpp"
#include "focus/image_io.hpp"
#include "focus/pipeline_json.hpp"
#include "focus/reports.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <charconv>
#include <map>
#include <ostream>
#include <system_error>

namespace focus {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(Stage stage) noexcept {
    switch (stage) {
        case Stage::Segment: return kExitSegmenter;
        case Stage::Propose: return kExitProposer;
        case Stage::Detect: return kExitDetector;
        case Stage::Input:
        case Stage::Isolate: break;
    }
    return kExitInput;
}

int exit_code_for(const std::exception_ptr& error) noexcept {
    try {
        std::rethrow_exception(error);
    } catch (const StageError& e) {
        return exit_code_for(e.stage());
    } catch (const AnnotationParseError&) {
        return kExitAnnotation;
    } catch (const AnnotationSchemaError&) {
        return kExitAnnotation;
    } catch (...) {
        return kExitInput;
    }
}

BBox parse_box(std::string_view text) {
    int v[4];
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        while (pos < text.size() && text[pos] == ' ') ++pos;
        const auto* first = text.data() + pos;
        const auto* last = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(first, last, v[i]);
        if (ec != std::errc{} || ptr == first) {
            throw std::invalid_argument(fmt::format("box '{}': expected four integers x0,y0,x1,y1", text));
        }
        pos = static_cast<std::size_t>(ptr - text.data());
        while (pos < text.size() && text[pos] == ' ') ++pos;
        if (i < 3) {
            if (pos >= text.size() || text[pos] != ',') {
                throw std::invalid_argument(fmt::format("box '{}': expected four integers x0,y0,x1,y1", text));
            }
            ++pos;
        }
    }
    if (pos != text.size()) {
        throw std::invalid_argument(fmt::format("box '{}': trailing characters", text));
    }
    return {v[0], v[1], v[2], v[3]};
}

RunConfig resolve_run_config(const Workspace& ws, const std::optional<fs::path>& config_file,
                             const ConfigOverrides& o) {
    auto config = default_run_config(ws.fixtures());
    if (config_file) {
        config = load_run_config(*config_file, std::move(config));
    }
    auto& p = config.pipeline;
    if (o.mode) p.mode = *o.mode;
    if (o.prompt_file) {
        try {
            p.prompt = parse_prompt_file(read_file_text(*o.prompt_file));
        } catch (const std::exception& e) {
            throw ConfigError(fmt::format("prompt file: {}", e.what()));
        }
    }
    if (o.parallelism) p.parallelism = *o.parallelism;
    if (o.containment) p.containment = *o.containment;
    if (o.base_tau) p.base_tau = *o.base_tau;
    if (o.normalization) p.normalization = *o.normalization;
    p.validate();
    return config;
}

namespace {

void report(std::ostream& err, const std::exception& e) { err << "error: " << e.what() << '\n'; }

std::string default_run_id(const std::vector<std::uint8_t>& image_bytes, const BBox& box,
                           const RunConfig& config, Variant variant, const std::string& subject) {
    const auto material = fmt::format("{}|{}|{}|{}|{}", sha256_hex(image_bytes), box.to_string(),
                                      config_snapshot(config).dump(), to_string(variant), subject);
    return "run-" + sha256_hex(material).substr(0, 12);
}

}  // namespace

int cmd_run(const Workspace& ws, const RunRequest& request, std::ostream& out, std::ostream& err) {
    std::optional<RunConfig> config_slot;
    std::optional<RasterImage> image_slot;
    std::optional<BBox> box_slot;
    std::vector<std::uint8_t> bytes;
    try {
        box_slot = parse_box(request.box);
        config_slot = resolve_run_config(ws, request.config_file, request.overrides);
        bytes = read_file_bytes(request.image);
        image_slot = decode_image(bytes);
        box_slot->require_within(image_slot->width(), image_slot->height());
    } catch (const std::exception& e) {
        report(err, e);
        return kExitInput;
    }
    const auto& config = *config_slot;
    const auto& image = *image_slot;
    const auto& box = *box_slot;
    const auto subject = request.subject.value_or(request.image.stem().string());
    const auto run_id = request.run_id.value_or(default_run_id(bytes, box, config, request.variant, subject));

    std::optional<PipelineResult> result_slot;
    try {
        const auto pipeline = config.make_pipeline();
        result_slot = request.variant == Variant::Focus ? pipeline.run(image, box, subject)
                                                   : pipeline.run_baseline(image, box, subject);
    } catch (const StageError& e) {
        err << "error: " << to_string(e.stage()) << " stage: " << e.what() << '\n';
        return exit_code_for(e.stage());
    } catch (const std::exception& e) {
        report(err, e);
        return kExitInput;
    }

    const auto& result = *result_slot;
    try {
        const auto attended_rel = fs::path("attended") / (run_id + ".png");
        ws.write_bytes(ws.root() / attended_rel, encode_png(result.attended->image));
        auto doc = to_json(result, {.include_timings = true, .attended_path = attended_rel.generic_string()});
        doc["run_id"] = run_id;
        doc["config"] = config_snapshot(config);
        const auto text = doc.dump(2) + "\n";
        ws.write_text(ws.results() / (run_id + ".json"), text);
        out << text;
    } catch (const std::exception& e) {
        report(err, e);
        return kExitInput;
    }
    return kExitOk;
}

EvalVariants parse_eval_variants(std::string_view text) {
    if (text == "focus") return EvalVariants::Focus;
    if (text == "baseline") return EvalVariants::Baseline;
    if (text == "both") return EvalVariants::Both;
    throw std::invalid_argument(fmt::format("unknown variant '{}' (focus|baseline|both)", text));
}

namespace {

std::vector<EvalCase> ingest(const EvalRequest& r) {
    if (r.dataset == "coco") {
        const auto targets = r.targets.empty() ? std::set<std::string>{"person"} : r.targets;
        return ingest_coco(r.annotations, targets, r.task ? TaskTag::parse(*r.task) : TaskTag::granular(),
                           r.image_root);
    }
    if (r.dataset == "voc") {
        const auto targets = r.targets.empty() ? std::set<std::string>{"car"} : r.targets;
        return ingest_voc(r.annotations, targets, r.task ? TaskTag::parse(*r.task) : TaskTag::vehicles(),
                          r.image_root);
    }
    throw std::invalid_argument(fmt::format("unknown dataset '{}' (coco|voc)", r.dataset));
}

struct VariantRun {
    Variant variant;
    std::vector<CaseOutcome> outcomes;
};

}  // namespace

int cmd_eval(const Workspace& ws, const EvalRequest& request, std::ostream& out, std::ostream& err) {
    std::optional<RunConfig> config_slot;
    std::vector<EvalCase> cases;
    fs::path report_dir;
    try {
        config_slot = resolve_run_config(ws, request.config_file, request.overrides);
        report_dir = ws.confine(request.report_name, ws.reports());
        if (report_dir == ws.reports()) {
            throw WorkspaceError("report name must not be empty");
        }
    } catch (const std::exception& e) {
        report(err, e);
        return kExitInput;
    }
    const auto& config = *config_slot;
    try {
        cases = ingest(request);
    } catch (const std::invalid_argument& e) {
        report(err, e);
        return kExitInput;
    } catch (const std::exception& e) {
        report(err, e);
        return kExitAnnotation;
    }
    if (cases.empty()) {
        err << "error: no annotations match the requested targets\n";
        return kExitInput;
    }

    std::vector<VariantRun> runs;
    try {
        const auto pipeline = config.make_pipeline();
        if (request.variants != EvalVariants::Baseline) {
            runs.push_back({Variant::Focus, pipeline.batch_run(cases, Variant::Focus)});
        }
        if (request.variants != EvalVariants::Focus) {
            // Baselines detect with the labels the focus run proposed, so
            // both methods are scored against the same list.
            LabelBook book;
            if (!runs.empty()) {
                for (const auto& o : runs.front().outcomes) {
                    if (o.ok()) book.emplace(o.case_id, o.result().proposal);
                }
            }
            runs.insert(runs.begin(), {Variant::Baseline, pipeline.batch_run(cases, Variant::Baseline, &book)});
        }
    } catch (const std::exception& e) {
        report(err, e);
        return kExitInput;
    }

    // A case is scored only if every variant succeeded on it.
    std::map<std::string, std::pair<std::string, CaseFailure>> failed;
    for (const auto& run : runs) {
        for (const auto& o : run.outcomes) {
            if (!o.ok() && !failed.contains(o.case_id)) {
                failed.emplace(o.case_id, std::pair{std::string(to_string(run.variant)), o.failure()});
            }
        }
    }
    if (failed.size() == cases.size()) {
        const auto& first = failed.at(cases.front().case_id);
        err << fmt::format("error: every case failed; first: {} ({} stage, {}): {}\n", cases.front().case_id,
                           to_string(first.second.stage), first.second.kind, first.second.message);
        return exit_code_for(first.second.stage);
    }

    std::vector<MethodResults> methods;
    std::string results_jsonl;
    for (const auto& run : runs) {
        MethodResults m{std::string(to_string(run.variant)), {}};
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const auto& o = run.outcomes[i];
            if (failed.contains(o.case_id)) continue;
            m.cases.push_back(make_scored_case(cases[i], o.result()));
            auto doc = to_json(o.result(), {.include_timings = false, .attended_path = {}});
            doc["case_id"] = o.case_id;
            results_jsonl += doc.dump() + "\n";
        }
        methods.push_back(std::move(m));
    }

    const auto level = config.pipeline.normalization;
    const std::vector<double> cutoffs(std::begin(kDefaultCutoffs), std::end(kDefaultCutoffs));
    std::map<std::string, std::string> files;
    try {
        const auto by_task = sweep(methods, cutoffs, request.aggregation, SweepGrouping::Task, level);
        const auto by_difficulty =
            sweep(methods, cutoffs, request.aggregation, SweepGrouping::TaskAndDifficulty, level);
        files["sweep.csv"] = sweep_csv(by_task);
        files["sweep.json"] = sweep_json(by_task).dump(2) + "\n";
        files["difficulty.csv"] = sweep_csv(by_difficulty);
        files["matches.jsonl"] = match_reports_jsonl(methods, cutoffs, level);
        files["results.jsonl"] = results_jsonl;
        if (methods.size() == 2) {
            const auto entries = discrepancy_report(methods[0], methods[1], request.min_count, request.top_k);
            files["discrepancy.json"] = discrepancy_json(entries, request.min_count, request.top_k).dump(2) + "\n";
        }

        auto snapshot = config_snapshot(config);
        snapshot.erase("parallelism");
        json failures = json::array();
        for (const auto& [id, f] : failed) {
            failures.push_back({{"case_id", id},
                                {"variant", f.first},
                                {"stage", to_string(f.second.stage)},
                                {"kind", f.second.kind},
                                {"message", f.second.message}});
        }
        const json summary = {{"dataset", request.dataset},
                              {"annotations", request.annotations.filename().string()},
                              {"cases", cases.size()},
                              {"scored", cases.size() - failed.size()},
                              {"failed", failures},
                              {"aggregation", to_string(request.aggregation)},
                              {"cutoffs", cutoffs},
                              {"config", snapshot}};
        files["summary.json"] = summary.dump(2) + "\n";

        // Stage everything next to the destination, then swap it in.
        const auto staging = report_dir.parent_path() / ("." + report_dir.filename().string() + ".partial");
        fs::remove_all(staging);
        for (const auto& [name, text] : files) {
            ws.write_text(staging / name, text);
        }
        fs::remove_all(report_dir);
        fs::rename(staging, report_dir);
    } catch (const std::exception& e) {
        report(err, e);
        return kExitInput;
    }

    out << files["sweep.csv"];
    if (!failed.empty()) {
        err << fmt::format("warning: {} of {} cases failed and were excluded (see summary.json)\n",
                           failed.size(), cases.size());
    }
    return kExitOk;
}

int cmd_mock_fixtures(const Workspace& ws, std::uint64_t seed, const fs::path& out_dir, std::ostream& out,
                      std::ostream& err) {
    try {
        const auto s = generate_corpus(ws, out_dir, seed);
        out << fmt::format("corpus {} (seed {}): coco {} images / {} cases, voc {} images / {} cases\n",
                           ws.confine(out_dir, ws.root()).string(), seed, s.coco_images, s.coco_cases,
                           s.voc_images, s.voc_cases);
        return kExitOk;
    } catch (const std::exception& e) {
        report(err, e);
        return kExitInput;
    }
}

}  // namespace focus
