#include "app.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>

#include "config.hpp"
#include "gazescreen/augment.hpp"
#include "gazescreen/error.hpp"
#include "gazescreen/eval.hpp"
#include "gazescreen/rng.hpp"
#include "pipeline.hpp"
#include "stages.hpp"

namespace gazescreen::cli {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

bool is_validation(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidConfig:
        case ErrorCode::InvalidParameter:
        case ErrorCode::InvalidParams:
        case ErrorCode::InvalidGeometry:
        case ErrorCode::InvalidProfile:
        case ErrorCode::UnsupportedDepth:
        case ErrorCode::UnknownSubcommand:
            return true;
        default:
            return false;
    }
}

PipelineConfig base_config(const std::string& config_path) {
    return config_path.empty() ? PipelineConfig{} : load_pipeline_config(config_path);
}

std::vector<fs::path> gaze_inputs(const fs::path& in) {
    if (fs::is_regular_file(in)) return {in};
    auto files = list_gaze_files(in);
    if (files.empty()) throw Error(ErrorCode::EmptyRecording, "no gaze CSVs in " + in.string());
    return files;
}

Tensor stack_inputs(const std::vector<Tensor>& items) {
    Tensor out(static_cast<int>(items.size()), items[0].c, items[0].h, items[0].w);
    const auto per = items[0].data.size();
    for (std::size_t i = 0; i < items.size(); ++i) {
        std::copy(items[i].data.begin(), items[i].data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(i * per));
    }
    return out;
}

struct Options {
    std::string config;
    std::string in, out, manifest, model, predictions, profile, style, tag = "synthetic", unit = "participant";
    std::string classes, backbone, transforms;
    std::vector<std::string> images;
    std::optional<std::uint64_t> seed, layout_seed;
    std::size_t n = 1;
    double duration_ms = 10000.0, rate_hz = 120.0, fraction = 0.8;
    std::optional<int> size, depth, input_size, epochs, batch_size, head_only_epochs, repeats;
    std::optional<double> width, lr, momentum, weight_decay;
    bool no_source = false, no_heatmap = false, batch_stats = false;
    double epsilon = 1e-4, tolerance = 1e-3;
    int params = 200, batch = 1;
};

void require_seed(const Options& o) {
    if (!o.seed) invalid("--seed is required");
}

int cmd_simulate(const Options& o, std::ostream& out) {
    require_seed(o);
    const auto profile = resolve_profile(o.profile);
    if (o.n < 1) invalid("--n must be at least 1");
    if (!(o.duration_ms > 0.0) || !(o.rate_hz > 0.0)) invalid("--duration-ms and --rate-hz must be positive");
    const auto layout = default_layout(o.layout_seed);

    const auto recs = simulate_cohort(profile, o.n, *o.seed, layout, o.duration_ms, o.rate_hz);
    fs::create_directories(o.out);
    for (const auto& r : recs) write_recording_files(r, o.out);
    out << fmt::format("wrote {} {} recordings to {}\n", recs.size(), profile.name, o.out);
    return 0;
}

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
    const auto cfg = base_config(o.config);
    const auto files = gaze_inputs(o.in);
    std::vector<GazeRecording> recs;
    for (const auto& f : files) recs.push_back(read_recording(f));

    fs::create_directories(o.out);
    std::map<std::string, std::size_t> per_group;
    for (const auto& r : recs) {
        if (!has_nominal_rate(r)) err << fmt::format("warning: {} is not sampled near {} Hz\n", r.participant_id, r.rate_hz);
        std::size_t off = 0;
        for (const auto& s : r.samples) {
            if (s.valid && (s.x_px < 0.0 || s.y_px < 0.0 || s.x_px >= cfg.geometry.screen_width_px ||
                            s.y_px >= cfg.geometry.screen_height_px)) {
                ++off;
            }
        }
        if (off > 0) err << fmt::format("warning: {} has {} valid samples off screen\n", r.participant_id, off);
        write_recording_files(r, o.out);
        ++per_group[std::string(group_name(r.group))];
    }
    out << fmt::format("ingested {} recordings", recs.size());
    for (const auto& [g, n] : per_group) out << fmt::format(", {} {}", n, g);
    out << '\n';
    return 0;
}

int cmd_events_export(const Options& o, std::ostream& out) {
    const auto cfg = base_config(o.config);
    const auto files = gaze_inputs(o.in);
    fs::create_directories(o.out);
    std::size_t fixations = 0;
    for (const auto& f : files) {
        const auto rec = read_recording(f);
        export_events(rec, cfg.detection, cfg.geometry, o.out);
        fixations += build_scanpath(rec, cfg.detection, cfg.geometry).fixations.size();
    }
    out << fmt::format("exported events for {} recordings ({} fixations) to {}\n", files.size(), fixations, o.out);
    return 0;
}

int cmd_render(const Options& o, std::ostream& out) {
    auto cfg = base_config(o.config);
    if (!o.style.empty()) {
        auto s = parse_style(o.style);
        if (!s) invalid("--style must be overlay or polyline");
        cfg.render.style = *s;
    }
    if (o.size) cfg.render.output_size = *o.size;
    validate(cfg.render);
    const auto files = gaze_inputs(o.in);

    fs::create_directories(o.out);
    for (const auto& f : files) render_recording(read_recording(f), cfg.detection, cfg.geometry, cfg.render, o.out);
    out << fmt::format("rendered {} {} images at {} px to {}\n", files.size(), style_name(cfg.render.style),
                       cfg.render.resolved_output_size(), o.out);
    return 0;
}

int cmd_augment(const Options& o, std::ostream& out) {
    const auto files = list_files(o.in, ".png");
    if (files.empty()) throw Error(ErrorCode::EmptyResult, "no PNGs in " + o.in);
    fs::create_directories(o.out);
    std::size_t written = 0;
    for (const auto& f : files) written += augment_image(f, o.out, !o.no_source).size() / 2;
    out << fmt::format("augmented {} images into {} images in {}\n", files.size(), written, o.out);
    return 0;
}

DatasetTag tag_option(const std::string& s) {
    auto t = parse_tag(s);
    if (!t) invalid("--tag must be one of A1, A2, B, synthetic");
    return *t;
}

void print_counts(const DatasetManifest& m, std::ostream& out) {
    for (auto g : m.classes()) out << fmt::format("  {}: {}\n", group_name(g), m.count(g));
}

int cmd_dataset_build(const Options& o, std::ostream& out) {
    const auto tag = tag_option(o.tag);
    const auto m = build_manifest(o.in, tag);
    save_manifest(m, o.out);
    out << fmt::format("{} images\n", m.size());
    print_counts(m, out);
    return 0;
}

int cmd_dataset_split(const Options& o, std::ostream& out) {
    require_seed(o);
    const auto unit = parse_unit(o.unit);
    if (!unit) invalid("--unit must be image or participant");
    if (!(o.fraction > 0.0 && o.fraction < 1.0)) invalid("--fraction must lie in (0, 1)");
    const auto m = load_manifest(o.manifest);

    const auto [train_set, test_set] = split(m, o.fraction, *o.seed, *unit);
    fs::create_directories(o.out);
    save_manifest(train_set, fs::path(o.out) / "train.json");
    save_manifest(test_set, fs::path(o.out) / "test.json");
    out << fmt::format("train {} / test {}\n", train_set.size(), test_set.size());
    return 0;
}

int cmd_dataset_subset(const Options& o, std::ostream& out) {
    const auto classes = parse_class_list(o.classes);
    if (classes.empty()) invalid("--classes is empty");
    const auto m = subset(load_manifest(o.manifest), classes);
    save_manifest(m, o.out);
    out << fmt::format("{} images\n", m.size());
    print_counts(m, out);
    return 0;
}

int cmd_train(const Options& o, std::ostream& out) {
    require_seed(o);
    auto cfg = base_config(o.config);
    if (o.depth) cfg.model.depth = *o.depth;
    if (o.input_size) cfg.model.input_size = *o.input_size;
    if (o.width) cfg.model.width_multiplier = *o.width;
    if (o.epochs) cfg.train.epochs = *o.epochs;
    if (o.batch_size) cfg.train.batch_size = *o.batch_size;
    if (o.lr) cfg.train.learning_rate = *o.lr;
    if (o.momentum) cfg.train.momentum = *o.momentum;
    if (o.weight_decay) cfg.train.weight_decay = *o.weight_decay;
    if (o.head_only_epochs) cfg.train.head_only_epochs = *o.head_only_epochs;
    if (!o.transforms.empty()) {
        if (o.transforms == "none") cfg.train.transforms = TrainTransforms::None;
        else if (o.transforms == "light") cfg.train.transforms = TrainTransforms::Light;
        else invalid("--transforms must be none or light");
    }
    if (!o.backbone.empty()) cfg.backbone = o.backbone;
    const auto m = load_manifest(o.manifest);
    if (!o.classes.empty()) cfg.model.classes = parse_class_list(o.classes);
    else if (o.config.empty()) cfg.model.classes = m.classes();
    validate(cfg.model);
    validate_train(cfg.train);
    if (cfg.backbone && !fs::exists(*cfg.backbone)) invalid("backbone file not found: " + cfg.backbone->string());

    auto model = build_model(cfg.model, derive_seed(*o.seed, 0));
    if (cfg.backbone) load_backbone(model, *cfg.backbone);
    cfg.train.seed = derive_seed(*o.seed, 1);
    const auto history = train(model, m, cfg.train);

    const fs::path model_path = o.out;
    if (model_path.has_parent_path()) fs::create_directories(model_path.parent_path());
    save_model(model, model_path);
    std::string hist = "epoch,phase,mean_loss,accuracy\n";
    for (const auto& e : history.epochs) {
        hist += fmt::format("{},{},{},{}\n", e.epoch, e.phase, e.mean_loss, e.accuracy);
        out << fmt::format("epoch {:3d} phase {} loss {:.4f} train {}\n", e.epoch, e.phase, e.mean_loss,
                           format_percent(e.accuracy));
    }
    auto hist_path = model_path;
    hist_path.replace_extension(".history.csv");
    write_text(hist_path, hist);
    out << fmt::format("saved {}\n", model_path.string());
    return 0;
}

int cmd_predict(const Options& o, std::ostream& out) {
    const auto model = load_model(o.model);
    const auto& classes = model.config().classes;
    out << "image,predicted";
    for (auto g : classes) out << ",p_" << group_name(g);
    out << '\n';
    for (const auto& path : o.images) {
        const auto probs = model.predict(read_png(path));
        const auto best = static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
        out << path << ',' << group_name(classes[best]);
        for (double p : probs) out << fmt::format(",{:.6f}", p);
        out << '\n';
    }
    return 0;
}

ConfusionMatrix matrix_from_predictions(const std::string& path, const std::string& class_list) {
    const auto text = read_text(path);
    std::vector<std::pair<GroupLabel, GroupLabel>> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) header.push_back(cell);
    }
    const auto col = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw Error(ErrorCode::MalformedHeader, path + ": missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto truth_col = col("truth");
    const auto pred_col = col("predicted");
    std::vector<GroupLabel> seen;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() <= std::max(truth_col, pred_col)) throw Error(ErrorCode::MalformedRow, path + ": " + line);
        const auto t = parse_group(cells[truth_col]);
        const auto p = parse_group(cells[pred_col]);
        if (!t || !p) throw Error(ErrorCode::MalformedRow, path + ": unknown class in '" + line + "'");
        rows.emplace_back(*t, *p);
        seen.push_back(*t);
        seen.push_back(*p);
    }
    auto classes = class_list.empty() ? seen : parse_class_list(class_list);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    ConfusionMatrix cm(classes);
    for (const auto& [t, p] : rows) cm.add(t, p);
    return cm;
}

int cmd_eval(const Options& o, std::ostream& out) {
    if (o.predictions.empty() == (o.model.empty() || o.manifest.empty())) {
        invalid("give either --model with --manifest, or --predictions");
    }
    ConfusionMatrix cm;
    RunMetadata meta;
    meta.tag = tag_option(o.tag);
    if (!o.predictions.empty()) {
        cm = matrix_from_predictions(o.predictions, o.classes);
        meta.depth = o.depth.value_or(18);
    } else {
        const auto model = load_model(o.model);
        const auto m = load_manifest(o.manifest);
        if (o.tag == "synthetic") meta.tag = m.tag();
        meta.depth = o.depth.value_or(model.config().depth);
        cm = evaluate(model, m);
    }
    const auto rep = report(cm, meta);
    if (!o.out.empty()) {
        fs::create_directories(o.out);
        write_text(fs::path(o.out) / "report.txt", rep.text);
        write_text(fs::path(o.out) / "confusion.csv", rep.csv);
        if (!o.no_heatmap) write_png(render_heatmap(cm), fs::path(o.out) / "confusion.png");
    }
    out << rep.table_row << '\n' << format_percent(accuracy(cm)) << '\n';
    return 0;
}

int cmd_pipeline(const Options& o, std::ostream& out) {
    require_seed(o);
    auto cfg = load_pipeline_config(o.config);
    if (!o.out.empty()) cfg.paths.out = o.out;
    if (o.repeats) cfg.eval.repeats = *o.repeats;
    validate(cfg);
    const auto result = run_pipeline(cfg, *o.seed, &out);
    out << fmt::format("accuracy {} (mean over {} splits)\n", format_percent(result.mean_accuracy),
                       result.accuracies.size());
    return 0;
}

int cmd_gradcheck(const Options& o, std::ostream& out) {
    ModelConfig mc;
    mc.depth = o.depth.value_or(8);
    mc.input_size = o.input_size.value_or(32);
    mc.width_multiplier = o.width.value_or(0.25);
    if (!o.classes.empty()) mc.classes = parse_class_list(o.classes);
    validate(mc);
    if (o.batch < 1 || o.params < 1 || !(o.epsilon > 0.0)) invalid("--batch, --params and --epsilon must be positive");
    const std::uint64_t seed = o.seed.value_or(0);

    auto model = build_model(mc, seed);
    Pcg64 rng(derive_seed(seed, 1));
    std::vector<Tensor> inputs;
    std::vector<int> labels;
    for (int b = 0; b < o.batch; ++b) {
        RasterImage img(mc.input_size, mc.input_size);
        for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.bounded(256));
        inputs.push_back(model.prepare_input(img));
        labels.push_back(static_cast<int>(rng.bounded(static_cast<std::uint64_t>(mc.n_classes()))));
    }
    GradCheckOptions opts{o.epsilon, o.params, derive_seed(seed, 2),
                          o.batch_stats ? BnMode::BatchStats : BnMode::RunningStats};
    const auto r = grad_check(model, stack_inputs(inputs), labels, opts);
    out << fmt::format("max relative error {:.3e} over {} parameters (worst: {})\n", r.max_relative_error, r.checked,
                       r.worst_parameter);
    if (r.max_relative_error >= o.tolerance) {
        out << fmt::format("FAIL: above tolerance {:g}\n", o.tolerance);
        return 2;
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gaze-scanpath screening pipeline", "gazescreen"};
    app.require_subcommand(1);
    Options o;

    auto* simulate = app.add_subcommand("simulate", "Simulate gaze recordings from a bias profile");
    simulate->add_option("--profile", o.profile, "control, depressive, anxious or a profile JSON")->required();
    simulate->add_option("--n", o.n, "Number of participants");
    simulate->add_option("--seed", o.seed, "Random seed");
    simulate->add_option("--out", o.out, "Output directory")->required();
    simulate->add_option("--duration-ms", o.duration_ms, "Recording length");
    simulate->add_option("--rate-hz", o.rate_hz, "Sampling rate");
    simulate->add_option("--layout-seed", o.layout_seed, "Permute emotion quadrants");

    auto* ingest = app.add_subcommand("ingest", "Check and copy gaze CSVs with their sidecars");
    ingest->add_option("--in", o.in, "Gaze CSV or directory")->required();
    ingest->add_option("--out", o.out, "Output directory")->required();
    ingest->add_option("--config", o.config, "Pipeline config (geometry block)");

    auto* events = app.add_subcommand("events", "Fixation and saccade tables");
    events->require_subcommand(1);
    auto* events_export = events->add_subcommand("export", "Write <id>.fixations.csv and <id>.saccades.csv");
    events_export->add_option("--in", o.in, "Gaze CSV or directory")->required();
    events_export->add_option("--out", o.out, "Output directory")->required();
    events_export->add_option("--config", o.config, "Pipeline config (geometry, detection)");

    auto* render = app.add_subcommand("render", "Render scanpath images");
    render->add_option("--in", o.in, "Gaze CSV or directory")->required();
    render->add_option("--out", o.out, "Output directory")->required();
    render->add_option("--style", o.style, "overlay or polyline");
    render->add_option("--size", o.size, "Output edge in pixels");
    render->add_option("--config", o.config, "Pipeline config (geometry, detection, render)");

    auto* augment = app.add_subcommand("augment", "Write the nine filter variants of every image");
    augment->add_option("--in", o.in, "Image directory")->required();
    augment->add_option("--out", o.out, "Output directory")->required();
    augment->add_flag("--no-source", o.no_source, "Do not copy the source images");

    auto* dataset = app.add_subcommand("dataset", "Manifests");
    dataset->require_subcommand(1);
    auto* build = dataset->add_subcommand("build", "Manifest from an image directory");
    build->add_option("--in", o.in, "Image directory")->required();
    build->add_option("--tag", o.tag, "A1, A2, B or synthetic");
    build->add_option("--out", o.out, "Manifest file")->required();
    auto* split_cmd = dataset->add_subcommand("split", "Stratified train/test split");
    split_cmd->add_option("--manifest", o.manifest, "Manifest file")->required();
    split_cmd->add_option("--fraction", o.fraction, "Training fraction");
    split_cmd->add_option("--seed", o.seed, "Random seed");
    split_cmd->add_option("--unit", o.unit, "image or participant");
    split_cmd->add_option("--out", o.out, "Output directory")->required();
    auto* subset_cmd = dataset->add_subcommand("subset", "Keep only some classes");
    subset_cmd->add_option("--manifest", o.manifest, "Manifest file")->required();
    subset_cmd->add_option("--classes", o.classes, "Comma-separated classes, e.g. C,D")->required();
    subset_cmd->add_option("--out", o.out, "Manifest file")->required();

    auto* train_cmd = app.add_subcommand("train", "Train a classifier");
    train_cmd->add_option("--manifest", o.manifest, "Training manifest")->required();
    train_cmd->add_option("--seed", o.seed, "Random seed");
    train_cmd->add_option("--out", o.out, "Model file (.rcm)")->required();
    train_cmd->add_option("--config", o.config, "Pipeline config (model, train)");
    train_cmd->add_option("--depth", o.depth, "8, 18, 34 or 50");
    train_cmd->add_option("--input-size", o.input_size, "Input edge in pixels");
    train_cmd->add_option("--width", o.width, "Channel width multiplier");
    train_cmd->add_option("--classes", o.classes, "Comma-separated classes");
    train_cmd->add_option("--epochs", o.epochs, "Epochs");
    train_cmd->add_option("--batch-size", o.batch_size, "Batch size");
    train_cmd->add_option("--lr", o.lr, "Learning rate");
    train_cmd->add_option("--momentum", o.momentum, "Momentum");
    train_cmd->add_option("--weight-decay", o.weight_decay, "Weight decay");
    train_cmd->add_option("--head-only-epochs", o.head_only_epochs, "Head-only epochs after --backbone");
    train_cmd->add_option("--transforms", o.transforms, "none or light");
    train_cmd->add_option("--backbone", o.backbone, "Pretrained weights (.rcm)");

    auto* predict = app.add_subcommand("predict", "Class probabilities for images");
    predict->add_option("--model", o.model, "Model file")->required();
    predict->add_option("--image", o.images, "PNG file(s)")->required();

    auto* eval = app.add_subcommand("eval", "Confusion matrix and accuracy");
    eval->add_option("--model", o.model, "Model file");
    eval->add_option("--manifest", o.manifest, "Test manifest");
    eval->add_option("--predictions", o.predictions, "CSV with truth and predicted columns");
    eval->add_option("--classes", o.classes, "Class list for --predictions");
    eval->add_option("--depth", o.depth, "Depth reported in the table row");
    eval->add_option("--tag", o.tag, "Dataset tag reported in the table row");
    eval->add_option("--out", o.out, "Output directory");
    eval->add_flag("--no-heatmap", o.no_heatmap, "Skip confusion.png");

    auto* pipeline = app.add_subcommand("pipeline", "Run every stage from one config");
    pipeline->add_option("--config", o.config, "Pipeline config")->required();
    pipeline->add_option("--seed", o.seed, "Random seed");
    pipeline->add_option("--out", o.out, "Output directory (overrides paths.out)");
    pipeline->add_option("--repeats", o.repeats, "Split repeats (overrides eval.repeats)");

    auto* gradcheck = app.add_subcommand("gradcheck", "Analytic vs numeric gradients");
    gradcheck->add_option("--depth", o.depth, "Depth");
    gradcheck->add_option("--input-size", o.input_size, "Input edge");
    gradcheck->add_option("--width", o.width, "Width multiplier");
    gradcheck->add_option("--classes", o.classes, "Comma-separated classes");
    gradcheck->add_option("--epsilon", o.epsilon, "Central-difference step");
    gradcheck->add_option("--params", o.params, "Parameters to check");
    gradcheck->add_option("--batch", o.batch, "Batch size");
    gradcheck->add_flag("--batch-stats", o.batch_stats, "Batch-norm in batch-statistics mode");
    gradcheck->add_option("--tolerance", o.tolerance, "Maximum relative error");
    gradcheck->add_option("--seed", o.seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(o, out);
        if (ingest->parsed()) return cmd_ingest(o, out, err);
        if (events_export->parsed()) return cmd_events_export(o, out);
        if (render->parsed()) return cmd_render(o, out);
        if (augment->parsed()) return cmd_augment(o, out);
        if (build->parsed()) return cmd_dataset_build(o, out);
        if (split_cmd->parsed()) return cmd_dataset_split(o, out);
        if (subset_cmd->parsed()) return cmd_dataset_subset(o, out);
        if (train_cmd->parsed()) return cmd_train(o, out);
        if (predict->parsed()) return cmd_predict(o, out);
        if (eval->parsed()) return cmd_eval(o, out);
        if (pipeline->parsed()) return cmd_pipeline(o, out);
        if (gradcheck->parsed()) return cmd_gradcheck(o, out);
        throw Error(ErrorCode::UnknownSubcommand, "no subcommand");
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        if (e.code() == ErrorCode::UnknownSubcommand) err << app.help();
        return is_validation(e.code()) ? 1 : 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace gazescreen::cli
