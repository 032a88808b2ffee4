#include <doctest.h>

#include <cmath>
#include <string>

#include "gazescreen/error.hpp"
#include "gazescreen/gaze_io.hpp"
#include "gazescreen/simulate.hpp"
#include "support.hpp"

using namespace gazescreen;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected gazescreen::Error");
    return ErrorCode::InvalidConfig;
}

}  // namespace

TEST_CASE("group labels use the fixed alphabetical order") {
    CHECK(group_index(GroupLabel::Anxious) == 0);
    CHECK(group_index(GroupLabel::Control) == 1);
    CHECK(group_index(GroupLabel::Depressive) == 2);
    CHECK(parse_group("Control") == GroupLabel::Control);
    CHECK(parse_group("d") == GroupLabel::Depressive);
    CHECK_FALSE(parse_group("happy").has_value());
    CHECK(group_letter(GroupLabel::Anxious) == "A");
}

TEST_CASE("parse 1200 rows at 120 Hz") {
    std::string csv = "t_ms,x_px,y_px,valid\n";
    for (int k = 0; k < 1200; ++k) {
        csv += std::to_string(std::llround(k * 1000.0 / 120.0)) + ",840.5,525.25,1\n";
    }
    const auto rec = parse_gaze_csv(csv);
    CHECK(rec.samples.size() == 1200);
    CHECK(rec.rate_hz == 120.0);
    CHECK(has_nominal_rate(rec));
    CHECK(rec.samples[5].x_px == 840.5);
}

TEST_CASE("parser errors") {
    CHECK(code_of([] { parse_gaze_csv("t_ms,x_px,y_px,valid\n"); }) == ErrorCode::EmptyRecording);
    CHECK(code_of([] { parse_gaze_csv("t_ms,x_px,valid\n0,1,1\n"); }) == ErrorCode::MalformedHeader);
    CHECK(code_of([] { parse_gaze_csv("t_ms,x_px,y_px,valid\n0,1,2\n"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([] { parse_gaze_csv("t_ms,x_px,y_px,valid\n0,1,2,yes\n"); }) == ErrorCode::MalformedRow);

    try {
        parse_gaze_csv("t_ms,x_px,y_px,valid\n16,1,1,1\n8,1,1,1\n");
        FAIL("expected NonMonotonicTimestamp");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonMonotonicTimestamp);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("invalid rows are kept and columns may be reordered") {
    const auto rec = parse_gaze_csv("valid,y_px,x_px,t_ms\n1,2,1,0\n0,0,0,8\n");
    REQUIRE(rec.samples.size() == 2);
    CHECK(rec.samples[0].x_px == 1.0);
    CHECK(rec.samples[0].y_px == 2.0);
    CHECK_FALSE(rec.samples[1].valid);
}

TEST_CASE("a single sample writes a two-line file") {
    GazeRecording rec;
    rec.participant_id = "p1";
    rec.samples = {{0, 840.0, 525.0, true}};
    const auto csv = write_gaze_csv(rec);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    CHECK(csv.rfind("t_ms,x_px,y_px,valid\n", 0) == 0);
}

TEST_CASE("metadata sidecar") {
    const auto rec = parse_gaze_csv("t_ms,x_px,y_px,valid\n0,1,1,1\n",
                                    R"({"participant_id":"d-07","group":"depressive","rate_hz":60,"cesd_score":31})");
    CHECK(rec.participant_id == "d-07");
    CHECK(rec.group == GroupLabel::Depressive);
    CHECK(rec.rate_hz == 60.0);
    CHECK(rec.meta.cesd_score == 31.0);
    CHECK_FALSE(rec.meta.age.has_value());

    CHECK(code_of([] { parse_gaze_csv("t_ms,x_px,y_px,valid\n0,1,1,1\n", R"({"group":"control"})"); }) ==
          ErrorCode::InvalidMetadata);
    CHECK(code_of([] { parse_gaze_csv("t_ms,x_px,y_px,valid\n0,1,1,1\n", R"({"participant_id":"x","group":"sad"})"); }) ==
          ErrorCode::InvalidMetadata);
}

TEST_CASE("simulated recordings round-trip bit-exactly") {
    const auto presets = preset_profiles();
    const auto layout = default_layout();
    const char* names[] = {"anxious", "control", "depressive"};
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto rec = simulate_recording(presets.at(names[seed % 3]), layout, 10000.0, 120.0, seed);
        testing::add_dropouts(rec, seed);
        if (seed % 4 == 0) {
            rec.meta.age = 20.5 + static_cast<double>(seed);
            rec.meta.sex = "f";
            rec.meta.lsas_score = 0.1;
        }
        const auto back = parse_gaze_csv(write_gaze_csv(rec), write_gaze_meta(rec));
        REQUIRE(back == rec);
    }
}

TEST_CASE("recording files on disk") {
    testing::TempDir dir;
    auto rec = simulate_recording(preset_profiles().at("control"), default_layout(), 1000.0, 120.0, 9);
    rec.participant_id = "control-001";
    const auto path = write_recording(rec, dir.path());
    CHECK(path.filename() == "control-001.csv");
    CHECK(std::filesystem::exists(meta_path_for(path)));
    CHECK(read_recording(path) == rec);
}

TEST_CASE("parsing ignores the global locale") {
    const auto rec = parse_gaze_csv("t_ms,x_px,y_px,valid\n0,12.75,3.5,1\n");
    CHECK(rec.samples[0].x_px == 12.75);
    CHECK(rec.samples[0].y_px == 3.5);
}
