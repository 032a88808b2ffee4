#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli/app.hpp"
#include "cli/stages.hpp"
#include "gazescreen/dataset.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "gazescreen");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = gazescreen::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

std::string slurp(const fs::path& p) { return gazescreen::cli::read_text(p); }

void write(const fs::path& p, const std::string& text) { gazescreen::cli::write_text(p, text); }

}  // namespace

TEST_CASE("usage errors exit 1 with usage on stderr") {
    auto r = run({"frobnicate"});
    CHECK(r.code == 1);
    CHECK(contains(r.err, "simulate"));
    CHECK(r.out.empty());

    r = run({});
    CHECK(r.code == 1);

    r = run({"simulate", "--profile", "control", "--out", "x", "--bogus"});
    CHECK(r.code == 1);

    r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "pipeline"));
}

TEST_CASE("seed is mandatory for simulate, split, train and pipeline") {
    testing::TempDir tmp;
    auto r = run({"simulate", "--profile", "control", "--n", "2", "--out", (tmp / "g").string()});
    CHECK(r.code == 1);
    CHECK(contains(r.err, "--seed"));
    CHECK_FALSE(fs::exists(tmp / "g"));

    CHECK(run({"dataset", "split", "--manifest", "m.json", "--out", (tmp / "s").string()}).code == 1);
    CHECK(run({"train", "--manifest", "m.json", "--out", (tmp / "m.rcm").string()}).code == 1);
    write(tmp / "c.json", "{}");
    CHECK(run({"pipeline", "--config", (tmp / "c.json").string()}).code == 1);
}

TEST_CASE("simulate writes recordings and sidecars deterministically") {
    testing::TempDir tmp;
    const auto a = tmp / "a";
    const auto b = tmp / "b";
    REQUIRE(run({"simulate", "--profile", "depressive", "--n", "3", "--seed", "5", "--out", a.string(),
                 "--duration-ms", "2000"}).code == 0);
    REQUIRE(run({"simulate", "--profile", "depressive", "--n", "3", "--seed", "5", "--out", b.string(),
                 "--duration-ms", "2000"}).code == 0);
    for (const auto* id : {"depressive-001", "depressive-002", "depressive-003"}) {
        CHECK(slurp(a / (std::string(id) + ".csv")) == slurp(b / (std::string(id) + ".csv")));
        CHECK(contains(slurp(a / (std::string(id) + ".meta.json")), "\"group\":\"depressive\""));
    }
    CHECK(run({"simulate", "--profile", "nobody", "--seed", "1", "--out", (tmp / "c").string()}).code == 1);
}

TEST_CASE("profile JSON files are accepted") {
    testing::TempDir tmp;
    write(tmp / "p.json", R"({"name": "mild", "base": "depressive", "group": "depressive", "sad_disengage_bonus_ms": 50})");
    const auto r = run({"simulate", "--profile", (tmp / "p.json").string(), "--n", "1", "--seed", "2", "--out",
                        (tmp / "g").string(), "--duration-ms", "1000"});
    CHECK(r.code == 0);
    CHECK(fs::exists(tmp / "g" / "mild-001.csv"));
}

TEST_CASE("events export, ingest, render and augment chain") {
    testing::TempDir tmp;
    REQUIRE(run({"simulate", "--profile", "control", "--n", "2", "--seed", "3", "--out", (tmp / "raw").string(),
                 "--duration-ms", "3000"}).code == 0);
    auto r = run({"ingest", "--in", (tmp / "raw").string(), "--out", (tmp / "gaze").string()});
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "ingested 2 recordings"));

    r = run({"events", "export", "--in", (tmp / "gaze").string(), "--out", (tmp / "ev").string()});
    REQUIRE(r.code == 0);
    CHECK(slurp(tmp / "ev" / "control-001.fixations.csv").rfind("start_ms,end_ms,cx,cy,n\n", 0) == 0);
    CHECK(slurp(tmp / "ev" / "control-001.saccades.csv").rfind("from,to,amplitude_deg,pass\n", 0) == 0);

    r = run({"render", "--in", (tmp / "gaze").string(), "--out", (tmp / "img").string(), "--size", "48"});
    REQUIRE(r.code == 0);
    const auto img = gazescreen::read_png(tmp / "img" / "control-001__overlay.png");
    CHECK(img.width() == 48);
    CHECK(img.height() == 48);

    CHECK(run({"render", "--in", (tmp / "gaze").string(), "--out", (tmp / "bad").string(), "--style", "sketch"}).code ==
          1);
    CHECK_FALSE(fs::exists(tmp / "bad"));

    r = run({"augment", "--in", (tmp / "img").string(), "--out", (tmp / "aug").string()});
    REQUIRE(r.code == 0);
    CHECK(gazescreen::cli::list_files(tmp / "aug", ".png").size() == 20);
    CHECK(fs::exists(tmp / "aug" / "control-002__overlay__posterize2.png"));
    CHECK(contains(slurp(tmp / "aug" / "control-002__overlay__negate.meta.json"), "\"participant_id\": \"control-002\""));

    const auto m = gazescreen::build_manifest(tmp / "aug", gazescreen::DatasetTag::A2);
    CHECK(m.size() == 20);
}

TEST_CASE("dataset split on 60 images reports 48 / 12") {
    testing::TempDir tmp;
    REQUIRE(run({"simulate", "--profile", "control", "--n", "30", "--seed", "1", "--out", (tmp / "g").string(),
                 "--duration-ms", "1500"}).code == 0);
    REQUIRE(run({"simulate", "--profile", "depressive", "--n", "30", "--seed", "2", "--out", (tmp / "g").string(),
                 "--duration-ms", "1500"}).code == 0);
    REQUIRE(run({"render", "--in", (tmp / "g").string(), "--out", (tmp / "img").string(), "--size", "32"}).code == 0);
    auto r = run({"dataset", "build", "--in", (tmp / "img").string(), "--tag", "A1", "--out",
                  (tmp / "all.json").string()});
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "60 images"));

    r = run({"dataset", "split", "--manifest", (tmp / "all.json").string(), "--fraction", "0.8", "--seed", "9",
             "--out", (tmp / "split").string()});
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "train 48 / test 12"));
    CHECK(gazescreen::load_manifest(tmp / "split" / "test.json").size() == 12);

    r = run({"dataset", "subset", "--manifest", (tmp / "all.json").string(), "--classes", "D", "--out",
             (tmp / "d.json").string()});
    REQUIRE(r.code == 0);
    CHECK(gazescreen::load_manifest(tmp / "d.json").size() == 30);

    CHECK(run({"dataset", "split", "--manifest", (tmp / "all.json").string(), "--fraction", "1.5", "--seed", "9",
               "--out", (tmp / "s2").string()}).code == 1);
}

TEST_CASE("eval on predictions prints 63.6%") {
    testing::TempDir tmp;
    std::string csv = "image_id,truth,predicted\n";
    // 7 of 11 correct.
    const char* rows[] = {"C,C", "C,C", "C,C", "C,D", "C,D", "D,D", "D,D", "D,D", "D,D", "D,C", "D,C"};
    int i = 0;
    for (const auto* row : rows) csv += "img" + std::to_string(i++) + "," + row + "\n";
    write(tmp / "pred.csv", csv);
    const auto r = run({"eval", "--predictions", (tmp / "pred.csv").string(), "--out", (tmp / "ev").string()});
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "63.6%"));
    CHECK(contains(slurp(tmp / "ev" / "report.txt"), "correct: 7 of 11"));
    CHECK(slurp(tmp / "ev" / "confusion.csv") ==
          "true\\predicted,control,depressive\ncontrol,3,2\ndepressive,2,4\n");
    CHECK(fs::exists(tmp / "ev" / "confusion.png"));

    CHECK(run({"eval", "--out", (tmp / "x").string()}).code == 1);
}

TEST_CASE("invalid config does no work") {
    testing::TempDir tmp;
    const auto out = tmp / "out";
    write(tmp / "typo.json", R"({"render": {"stroke_widht_px": 3}, "paths": {"out": ")" + out.string() + R"("}})");
    auto r = run({"pipeline", "--config", (tmp / "typo.json").string(), "--seed", "1"});
    CHECK(r.code == 1);
    CHECK(contains(r.err, "stroke_widht_px"));
    CHECK_FALSE(fs::exists(out));

    write(tmp / "depth.json", R"({"model": {"depth": 19}, "paths": {"out": ")" + out.string() + R"("}})");
    CHECK(run({"pipeline", "--config", (tmp / "depth.json").string(), "--seed", "1"}).code == 1);
    CHECK_FALSE(fs::exists(out));

    write(tmp / "frac.json", R"({"dataset": {"fraction": 1.0}})");
    CHECK(run({"pipeline", "--config", (tmp / "frac.json").string(), "--seed", "1"}).code == 1);

    write(tmp / "cls.json", R"({"simulate": {"profiles": ["control", "anxious"]}, "model": {"classes": ["C", "D"]}})");
    CHECK(run({"pipeline", "--config", (tmp / "cls.json").string(), "--seed", "1"}).code == 1);

    CHECK(run({"pipeline", "--config", (tmp / "missing.json").string(), "--seed", "1"}).code == 1);
}

TEST_CASE("train, predict and eval on a model file") {
    testing::TempDir tmp;
    for (const auto* p : {"control", "depressive"}) {
        REQUIRE(run({"simulate", "--profile", p, "--n", "4", "--seed", "4", "--out", (tmp / "g").string(),
                     "--duration-ms", "2000"}).code == 0);
    }
    REQUIRE(run({"render", "--in", (tmp / "g").string(), "--out", (tmp / "img").string(), "--size", "32"}).code == 0);
    REQUIRE(run({"dataset", "build", "--in", (tmp / "img").string(), "--out", (tmp / "all.json").string()}).code == 0);
    auto r = run({"train", "--manifest", (tmp / "all.json").string(), "--seed", "1", "--out",
                  (tmp / "m" / "model.rcm").string(), "--depth", "8", "--width", "0.25", "--input-size", "32",
                  "--epochs", "2", "--batch-size", "4"});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(tmp / "m" / "model.rcm"));
    CHECK(fs::exists(tmp / "m" / "model.history.csv"));

    r = run({"predict", "--model", (tmp / "m" / "model.rcm").string(), "--image",
             (tmp / "img" / "control-001__overlay.png").string()});
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "image,predicted,p_control,p_depressive"));

    r = run({"eval", "--model", (tmp / "m" / "model.rcm").string(), "--manifest", (tmp / "all.json").string()});
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "ResNet-8,(Synthetic) C, D,"));

    CHECK(run({"train", "--manifest", (tmp / "all.json").string(), "--seed", "1", "--out",
               (tmp / "m2.rcm").string(), "--depth", "19"}).code == 1);
    CHECK(run({"predict", "--model", (tmp / "nope.rcm").string(), "--image", "x.png"}).code == 2);
}

TEST_CASE("gradcheck subcommand") {
    const auto r = run({"gradcheck", "--params", "40"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "over 40 parameters"));
}

TEST_CASE("pipeline is reproducible from its seed") {
    testing::TempDir tmp;
    write(tmp / "demo.json", R"({
        "simulate": {"profiles": ["control", "depressive"], "n": 5, "duration_ms": 3000},
        "render": {"output_size": 32},
        "dataset": {"fraction": 0.6},
        "model": {"depth": 8, "input_size": 32, "width_multiplier": 0.25},
        "train": {"epochs": 2, "batch_size": 4},
        "eval": {"repeats": 2},
        "paths": {"out": "run"}
    })");
    auto r1 = run({"pipeline", "--config", (tmp / "demo.json").string(), "--seed", "7"});
    REQUIRE(r1.code == 0);
    const auto first = slurp(tmp / "run" / "report.txt");
    CHECK(contains(first, "mean accuracy over 2 splits"));
    CHECK(fs::exists(tmp / "run" / "splits" / "repeat-1" / "model.rcm"));
    CHECK(contains(slurp(tmp / "run" / "run.jsonl"), "\"stage\":\"render\""));

    auto r2 = run({"pipeline", "--config", (tmp / "demo.json").string(), "--seed", "7", "--out",
                   (tmp / "again").string()});
    REQUIRE(r2.code == 0);
    CHECK(slurp(tmp / "again" / "report.txt") == first);
    CHECK(slurp(tmp / "again" / "manifest.json") == slurp(tmp / "run" / "manifest.json"));
}
