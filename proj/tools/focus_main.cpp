// focus: command-line front end (run, eval, serve, mock-fixtures).

#include "focus/commands.hpp"
#include "focus/service.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct CommonFlags {
    std::string workspace;
    std::string config;
    std::string mode;
    std::string prompt_file;
    std::string containment;
    std::string normalization;
    int parallelism = 0;
    double base_tau = -1.0;
};

void add_pipeline_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "JSON config file (flags override it)");
    cmd->add_option("--mode", f.mode, "isolation mode")
        ->check(CLI::IsMember({"full", "rect_mask", "crop", "segment_mask"}));
    cmd->add_option("--prompt-file", f.prompt_file, "task prompt, optional '---' line, addendum");
    cmd->add_option("--containment", f.containment, "baseline filter: center_in | fully_inside | ioa>=T");
    cmd->add_option("--normalization", f.normalization, "exact | fold_plurals");
    cmd->add_option("--base-tau", f.base_tau, "detector threshold");
}

focus::ConfigOverrides overrides_from(const CommonFlags& f) {
    focus::ConfigOverrides o;
    if (!f.mode.empty()) o.mode = focus::parse_isolation_mode(f.mode);
    if (!f.prompt_file.empty()) o.prompt_file = f.prompt_file;
    if (!f.containment.empty()) o.containment = focus::ContainmentPolicy::parse(f.containment);
    if (!f.normalization.empty()) o.normalization = focus::parse_label_normalization(f.normalization);
    if (f.parallelism > 0) o.parallelism = f.parallelism;
    if (f.base_tau >= 0.0) o.base_tau = f.base_tau;
    return o;
}

std::optional<std::filesystem::path> optional_path(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Region-focused open-vocabulary detection pipeline"};
    app.require_subcommand(1);
    CommonFlags flags;
    app.add_option("--workspace", flags.workspace, "workspace root")->envname("FOCUS_WORKSPACE");

    auto* run = app.add_subcommand("run", "run the pipeline on one image and box");
    focus::RunRequest run_req;
    std::string image, variant = "focus", subject, run_id;
    run->add_option("image", image, "PNG or JPEG image")->required();
    run->add_option("--box", run_req.box, "x0,y0,x1,y1 (half-open pixel box)")->required();
    run->add_option("--variant", variant, "focus | baseline")->check(CLI::IsMember({"focus", "baseline"}));
    run->add_option("--subject", subject, "fixture key for mock backends (default: image stem)");
    run->add_option("--run-id", run_id, "result name (default: digest of inputs)");
    add_pipeline_flags(run, flags);

    auto* eval = app.add_subcommand("eval", "batch evaluation over an annotated dataset");
    focus::EvalRequest eval_req;
    std::string annotations, image_root, task, variants = "both", aggregation = "macro";
    std::vector<std::string> targets;
    eval->add_option("--dataset", eval_req.dataset, "coco | voc")
        ->check(CLI::IsMember({"coco", "voc"}))
        ->capture_default_str();
    eval->add_option("--annotations", annotations, "COCO instances JSON or VOC Annotations dir")->required();
    eval->add_option("--targets", targets, "categories to query (default person / car)")->delimiter(',');
    eval->add_option("--image-root", image_root, "directory image paths resolve against");
    eval->add_option("--task", task, "task tag for the sweep rows");
    eval->add_option("--variant", variants, "focus | baseline | both")
        ->check(CLI::IsMember({"focus", "baseline", "both"}));
    eval->add_option("--report", eval_req.report_name, "report directory under <workspace>/reports");
    eval->add_option("--aggregation", aggregation, "macro | micro")->check(CLI::IsMember({"macro", "micro"}));
    eval->add_option("--min-count", eval_req.min_count, "discrepancy: minimum images per label");
    eval->add_option("-k,--top-k", eval_req.top_k, "discrepancy: labels to report");
    eval->add_option("--parallelism", flags.parallelism, "cases in flight");
    add_pipeline_flags(eval, flags);

    auto* serve = app.add_subcommand("serve", "HTTP API for the guidance UI");
    focus::ServeOptions serve_opts;
    std::string static_dir;
    serve->add_option("--host", serve_opts.host, "bind address");
    serve->add_option("--port", serve_opts.port, "bind port");
    serve->add_option("--static", static_dir, "directory served at /");
    serve->add_option("--parallelism", flags.parallelism, "concurrent runs");
    add_pipeline_flags(serve, flags);

    auto* mock = app.add_subcommand("mock-fixtures", "generate the synthetic fixture corpus");
    std::uint64_t seed = 42;
    std::string out_dir = "corpus";
    mock->add_option("--seed", seed, "RNG seed");
    mock->add_option("--out", out_dir, "output directory, relative to the workspace root");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : focus::kExitInput;
    }

    try {
        const focus::Workspace ws(flags.workspace.empty() ? focus::Workspace::default_root()
                                                          : std::filesystem::path(flags.workspace));
        if (*run) {
            run_req.image = image;
            run_req.config_file = optional_path(flags.config);
            run_req.overrides = overrides_from(flags);
            run_req.variant = focus::parse_variant(variant);
            if (!subject.empty()) run_req.subject = subject;
            if (!run_id.empty()) run_req.run_id = run_id;
            return focus::cmd_run(ws, run_req, std::cout, std::cerr);
        }
        if (*eval) {
            eval_req.annotations = annotations;
            eval_req.targets = {targets.begin(), targets.end()};
            eval_req.image_root = optional_path(image_root);
            if (!task.empty()) eval_req.task = task;
            eval_req.config_file = optional_path(flags.config);
            eval_req.overrides = overrides_from(flags);
            eval_req.variants = focus::parse_eval_variants(variants);
            eval_req.aggregation = focus::parse_aggregation(aggregation);
            return focus::cmd_eval(ws, eval_req, std::cout, std::cerr);
        }
        if (*serve) {
            const auto config = focus::resolve_run_config(ws, optional_path(flags.config), overrides_from(flags));
            serve_opts.static_dir = optional_path(static_dir);
            return focus::cmd_serve(ws, config, serve_opts, std::cout, std::cerr);
        }
        return focus::cmd_mock_fixtures(ws, seed, out_dir, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return focus::kExitInput;
    }
}
