#include "pipeline.hpp"

#include <fmt/format.h>

#include "gazescreen/dataset.hpp"
#include "gazescreen/error.hpp"
#include "gazescreen/model.hpp"
#include "gazescreen/rng.hpp"
#include "run_log.hpp"
#include "stages.hpp"

namespace gazescreen::cli {

namespace {

// Seed streams; each stage draws from its own offset so changing one stage's
// consumption leaves the others untouched.
constexpr std::uint64_t kSimulateStream = 0;
constexpr std::uint64_t kSplitStream = 1000;
constexpr std::uint64_t kInitStream = 2000;
constexpr std::uint64_t kTrainStream = 3000;

void say(std::ostream* out, const std::string& line) {
    if (out) *out << line << '\n';
}

std::vector<fs::path> write_report_files(const Report& r, const ConfusionMatrix& cm, const fs::path& dir,
                                         bool heatmap) {
    std::vector<fs::path> out = {dir / "report.txt", dir / "confusion.csv"};
    write_text(out[0], r.text);
    write_text(out[1], r.csv);
    if (heatmap) {
        out.push_back(dir / "confusion.png");
        write_png(render_heatmap(cm), out.back());
    }
    return out;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg, std::uint64_t seed, std::ostream* progress) {
    validate(cfg);

    const fs::path root = cfg.paths.out;
    const fs::path gaze_dir = root / "gaze";
    const fs::path events_dir = root / "events";
    const fs::path images_dir = root / "images";
    const fs::path splits_dir = root / "splits";
    for (const auto& d : {gaze_dir, events_dir, images_dir, splits_dir}) {
        fs::remove_all(d);
        fs::create_directories(d);
    }
    RunLog log(root / "run.jsonl");

    std::vector<GazeRecording> recordings;
    std::vector<fs::path> written;
    if (cfg.paths.in) {
        log.begin("ingest");
        for (const auto& csv : list_gaze_files(*cfg.paths.in)) recordings.push_back(read_recording(csv));
    } else {
        log.begin("simulate");
        const auto layout = default_layout(cfg.simulate.layout_seed);
        for (std::size_t p = 0; p < cfg.simulate.profiles.size(); ++p) {
            auto cohort = simulate_cohort(resolve_profile(cfg.simulate.profiles[p]), cfg.simulate.n,
                                          derive_seed(derive_seed(seed, kSimulateStream), p), layout,
                                          cfg.simulate.duration_ms, cfg.simulate.rate_hz);
            for (auto& r : cohort) recordings.push_back(std::move(r));
        }
    }
    if (recordings.empty()) throw Error(ErrorCode::EmptyRecording, "no gaze recordings to process");
    for (const auto& rec : recordings) {
        for (auto& p : write_recording_files(rec, gaze_dir)) written.push_back(std::move(p));
    }
    log.end(written, root);
    say(progress, fmt::format("gaze: {} recordings", recordings.size()));

    log.begin("events");
    written.clear();
    for (const auto& rec : recordings) {
        for (auto& p : export_events(rec, cfg.detection, cfg.geometry, events_dir)) written.push_back(std::move(p));
    }
    log.end(written, root);

    log.begin("render");
    written.clear();
    std::vector<fs::path> rendered;
    for (const auto& rec : recordings) {
        auto files = render_recording(rec, cfg.detection, cfg.geometry, cfg.render, images_dir);
        rendered.push_back(files.front());
        for (auto& p : files) written.push_back(std::move(p));
    }
    log.end(written, root);
    say(progress, fmt::format("render: {} images", rendered.size()));

    if (cfg.augment) {
        log.begin("augment");
        written.clear();
        for (const auto& png : rendered) {
            for (auto& p : augment_image(png, images_dir, false)) written.push_back(std::move(p));
        }
        log.end(written, root);
        say(progress, fmt::format("augment: {} variants", written.size() / 2));
    }

    log.begin("manifest");
    const auto manifest = subset(build_manifest(images_dir, cfg.dataset.tag), cfg.model.classes);
    save_manifest(manifest, root / "manifest.json");
    log.end({root / "manifest.json"}, root);

    PipelineResult result;
    result.pooled = ConfusionMatrix(cfg.model.classes);
    const RunMetadata split_meta{cfg.model.depth, cfg.dataset.tag, std::nullopt, std::nullopt};
    for (int r = 0; r < cfg.eval.repeats; ++r) {
        const auto ri = static_cast<std::uint64_t>(r);
        const fs::path dir = splits_dir / fmt::format("repeat-{}", r);
        fs::create_directories(dir);

        log.begin(fmt::format("split[{}]", r));
        const auto split_base = cfg.dataset.seed ? *cfg.dataset.seed : derive_seed(seed, kSplitStream);
        auto [train_set, test_set] = split(manifest, cfg.dataset.fraction, derive_seed(split_base, ri), cfg.dataset.unit);
        save_manifest(train_set, dir / "train.json");
        save_manifest(test_set, dir / "test.json");
        log.end({dir / "train.json", dir / "test.json"}, root);

        log.begin(fmt::format("train[{}]", r));
        auto model = build_model(cfg.model, derive_seed(derive_seed(seed, kInitStream), ri));
        if (cfg.backbone) load_backbone(model, *cfg.backbone);
        auto tc = cfg.train;
        tc.seed = derive_seed(derive_seed(seed, kTrainStream), ri);
        const auto history = train(model, train_set, tc);
        save_model(model, dir / "model.rcm");
        std::string hist = "epoch,phase,mean_loss,accuracy\n";
        for (const auto& e : history.epochs) {
            hist += fmt::format("{},{},{},{}\n", e.epoch, e.phase, e.mean_loss, e.accuracy);
        }
        write_text(dir / "history.csv", hist);
        log.end({dir / "model.rcm", dir / "history.csv"}, root);

        log.begin(fmt::format("eval[{}]", r));
        const auto cm = evaluate(model, test_set);
        const auto rep = report(cm, split_meta);
        log.end(write_report_files(rep, cm, dir, cfg.eval.heatmap), root);

        for (std::size_t t = 0; t < cm.size(); ++t) {
            for (std::size_t p = 0; p < cm.size(); ++p) {
                for (std::size_t k = 0; k < cm.at(t, p); ++k) result.pooled.add(t, p);
            }
        }
        result.accuracies.push_back(accuracy(cm));
        say(progress, fmt::format("repeat {}: train {} / test {}, accuracy {}", r, train_set.size(), test_set.size(),
                                  format_percent(result.accuracies.back())));
    }

    double sum = 0.0;
    for (double a : result.accuracies) sum += a;
    result.mean_accuracy = sum / static_cast<double>(result.accuracies.size());

    log.begin("report");
    RunMetadata meta{cfg.model.depth, cfg.dataset.tag, std::nullopt, std::nullopt};
    if (cfg.eval.repeats > 1) {
        meta.repeats = static_cast<std::size_t>(cfg.eval.repeats);
        meta.mean_accuracy = result.mean_accuracy;
    }
    result.report = report(result.pooled, meta);
    if (cfg.eval.repeats > 1) {
        result.report.text += "\nper-split accuracy\n";
        for (std::size_t r = 0; r < result.accuracies.size(); ++r) {
            result.report.text += fmt::format("repeat-{},{}\n", r, format_percent(result.accuracies[r]));
        }
    }
    log.end(write_report_files(result.report, result.pooled, root, cfg.eval.heatmap), root);
    say(progress, result.report.table_row);
    return result;
}

}  // namespace gazescreen::cli
