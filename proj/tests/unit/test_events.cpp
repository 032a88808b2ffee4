#include <doctest.h>

#include <algorithm>

#include "gazescreen/error.hpp"
#include "gazescreen/events.hpp"
#include "gazescreen/rng.hpp"
#include "gazescreen/simulate.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace gazescreen;

namespace {

void check_against_oracle(const GazeRecording& rec, const DetectionParams& p = {}, const ViewingGeometry& g = {}) {
    const auto got = detect_fixations(rec, p, g);
    const auto want = oracle::brute_force_idt(rec, degrees_to_pixels(p.dispersion_threshold_deg, g),
                                              initial_window_samples(p.min_duration_ms, rec.rate_hz), p.max_gap_ms,
                                              g.screen_width_px, g.screen_height_px);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].start_ms == want[i].start_ms);
        CHECK(got[i].end_ms == want[i].end_ms);
        CHECK(got[i].n_samples == want[i].n);
        CHECK(std::abs(got[i].centroid_x_px - want[i].cx) <= 1e-9);
        CHECK(std::abs(got[i].centroid_y_px - want[i].cy) <= 1e-9);
    }
}

Fixation fixation_at(std::int64_t start, std::int64_t end, double x, double y) {
    Fixation f;
    f.start_ms = start;
    f.end_ms = end;
    f.centroid_x_px = x;
    f.centroid_y_px = y;
    f.n_samples = 2;
    return f;
}

GazeRecording two_clusters(std::uint64_t seed) {
    Pcg64 rng(seed);
    GazeRecording rec;
    for (int k = 0; k < 1200; ++k) {
        const bool first = k < 600;
        const double cx = first ? 400.0 : 1200.0;
        const double cy = first ? 400.0 : 600.0;
        rec.samples.push_back({std::llround(k * 1000.0 / 120.0), cx + rng.uniform(-5.0, 5.0),
                               cy + rng.uniform(-5.0, 5.0), true});
    }
    return rec;
}

}  // namespace

TEST_CASE("window bootstrap at 120 Hz holds 10 samples") {
    CHECK(initial_window_samples(80.0, 120.0) == 10);
    CHECK(initial_window_samples(80.0, 60.0) == 5);
    CHECK(initial_window_samples(1.0, 120.0) == 2);
}

TEST_CASE("constant signal gives one fixation") {
    const auto rec = testing::constant_recording(60, 500.0, 500.0);
    const auto fx = detect_fixations(rec, {}, {});
    REQUIRE(fx.size() == 1);
    CHECK(fx[0].duration_ms() == doctest::Approx(491.7).epsilon(0.002));
    CHECK(fx[0].centroid_x_px == 500.0);
    CHECK(fx[0].centroid_y_px == 500.0);
    CHECK(fx[0].n_samples == 60);
}

TEST_CASE("two noisy clusters") {
    const auto rec = two_clusters(3);
    const auto fx = detect_fixations(rec, {}, {});
    REQUIRE(fx.size() == 2);
    CHECK(std::abs(fx[0].centroid_x_px - 400.0) < 2.0);
    CHECK(std::abs(fx[0].centroid_y_px - 400.0) < 2.0);
    CHECK(std::abs(fx[1].centroid_x_px - 1200.0) < 2.0);
    CHECK(std::abs(fx[1].centroid_y_px - 600.0) < 2.0);
    check_against_oracle(rec);

    const auto sp = build_scanpath(rec, {}, {});
    CHECK(sp.fixations.empty());
    CHECK(sp.saccades.empty());
}

TEST_CASE("constant 10 s recording is filtered out entirely") {
    const auto rec = testing::constant_recording(1200, 840.0, 525.0);
    const auto fx = detect_fixations(rec, {}, {});
    REQUIRE(fx.size() == 1);
    CHECK(fx[0].duration_ms() == doctest::Approx(9992.0).epsilon(0.001));
    const auto sp = build_scanpath(rec, {}, {});
    CHECK(sp.fixations.empty());
    CHECK(sp.raw_polyline.size() == 1200);
}

TEST_CASE("truncate policy keeps the leading 1200 ms") {
    const auto rec = testing::constant_recording(1200, 840.0, 525.0);
    DetectionParams p;
    p.overlong = OverlongPolicy::Truncate;
    const auto sp = build_scanpath(rec, p, {});
    REQUIRE(sp.fixations.size() == 1);
    CHECK(sp.fixations[0].start_ms == 0);
    CHECK(sp.fixations[0].duration_ms() <= 1200);
    CHECK(sp.fixations[0].duration_ms() > 1190);
    CHECK(sp.fixations[0].centroid_x_px == 840.0);
}

TEST_CASE("short gaps are bridged, long gaps split") {
    auto rec = testing::constant_recording(60, 500.0, 500.0);
    for (int k = 20; k < 28; ++k) rec.samples[k].valid = false;  // 9 periods = 75 ms
    auto fx = detect_fixations(rec, {}, {});
    REQUIRE(fx.size() == 1);
    CHECK(fx[0].n_samples == 52);
    CHECK(fx[0].start_ms == 0);

    rec.samples[28].valid = false;  // 10 periods = 83 ms
    fx = detect_fixations(rec, {}, {});
    REQUIRE(fx.size() == 2);
    CHECK(fx[0].end_ms < fx[1].start_ms);
    check_against_oracle(rec);
}

TEST_CASE("empty recording is an error") {
    GazeRecording rec;
    CHECK_THROWS_AS(detect_fixations(rec, {}, {}), Error);
    CHECK_THROWS_AS(build_scanpath(rec, {}, {}), Error);
}

TEST_CASE("invalid detection parameters") {
    DetectionParams p;
    p.fixation_duration_min_ms = 2000.0;
    CHECK_THROWS_AS(validate(p), Error);
    p = {};
    p.max_gap_ms = 0.0;
    CHECK_THROWS_AS(validate(p), Error);
}

TEST_CASE("saccade amplitudes and filter flag") {
    const ViewingGeometry g;
    const DetectionParams p;
    CHECK(derive_saccades({}, g, p).empty());
    CHECK(derive_saccades({fixation_at(0, 100, 0, 0)}, g, p).empty());

    const auto one_deg = degrees_to_pixels(1.0, g);
    auto s = derive_saccades({fixation_at(0, 100, 0, 0), fixation_at(200, 300, 37.14, 0)}, g, p);
    REQUIRE(s.size() == 1);
    CHECK(s[0].amplitude_deg == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(s[0].passes_filter);
    CHECK(s[0].to_fixation_index == s[0].from_fixation_index + 1);

    s = derive_saccades({fixation_at(0, 100, 0, 0), fixation_at(200, 300, 240, 320)}, g, p);
    CHECK(s[0].amplitude_deg == doctest::Approx(oracle::px_to_deg(400.0, 600.0, 0.282)).epsilon(1e-12));
    CHECK(s[0].amplitude_deg > 10.0);
    CHECK_FALSE(s[0].passes_filter);

    ScanPath sp;
    CHECK(scanpath_length(sp, g) == 0.0);
    sp.fixations = {fixation_at(0, 100, 0, 0), fixation_at(200, 300, one_deg, 0)};
    sp.saccades = derive_saccades(sp.fixations, g, p);
    CHECK(scanpath_length(sp, g) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("detector equals the brute-force oracle on noisy simulated data") {
    const auto presets = preset_profiles();
    const char* names[] = {"anxious", "control", "depressive"};
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        auto profile = presets.at(names[seed % 3]);
        profile.jitter_px = 1.0 + static_cast<double>(seed % 5) * 2.0;
        auto rec = simulate_recording(profile, default_layout(), 10000.0, 120.0, seed);
        testing::add_dropouts(rec, seed + 1000);
        check_against_oracle(rec);
    }
}

TEST_CASE("scan path invariants on simulator output") {
    const auto rec = simulate_recording(preset_profiles().at("control"), default_layout(), 10000.0, 120.0, 1);
    const DetectionParams p;
    const auto sp = build_scanpath(rec, p, {});
    REQUIRE_FALSE(sp.fixations.empty());
    CHECK(sp.saccades.size() == sp.fixations.size() - 1);
    for (std::size_t i = 0; i < sp.fixations.size(); ++i) {
        const auto d = sp.fixations[i].duration_ms();
        CHECK(d >= 80);
        CHECK(d <= 1200);
        if (i > 0) CHECK(sp.fixations[i - 1].end_ms < sp.fixations[i].start_ms);
    }
    for (std::size_t i = 0; i < sp.saccades.size(); ++i) CHECK(sp.saccades[i].from_fixation_index == i);
}

TEST_CASE("duration filter is idempotent") {
    for (auto policy : {OverlongPolicy::Drop, OverlongPolicy::Truncate}) {
        DetectionParams p;
        p.overlong = policy;
        auto profile = preset_profiles().at("depressive");
        profile.fixation_mean_ms.fill(900.0);  // push some dwell past 1200 ms with the sad bonus
        const auto rec = simulate_recording(profile, default_layout(), 10000.0, 120.0, 5);
        const auto once = filter_durations(detect_fixations(rec, p, {}), rec, p);
        CHECK(filter_durations(once, rec, p) == once);
    }
}

TEST_CASE("centroid stays inside the member bounding box") {
    const auto rec = simulate_recording(preset_profiles().at("anxious"), default_layout(), 10000.0, 120.0, 2);
    for (const auto& f : detect_fixations(rec, {}, {})) {
        double x0 = 1e9, x1 = -1e9, y0 = 1e9, y1 = -1e9;
        for (std::size_t i = f.first_sample; i <= f.last_sample; ++i) {
            const auto& s = rec.samples[i];
            x0 = std::min(x0, s.x_px);
            x1 = std::max(x1, s.x_px);
            y0 = std::min(y0, s.y_px);
            y1 = std::max(y1, s.y_px);
        }
        CHECK(f.centroid_x_px >= x0);
        CHECK(f.centroid_x_px <= x1);
        CHECK(f.centroid_y_px >= y0);
        CHECK(f.centroid_y_px <= y1);
        CHECK(f.duration_ms() > 0);
    }
}

TEST_CASE("amplitudes are invariant under joint scaling of coordinates and screen size") {
    const auto rec = simulate_recording(preset_profiles().at("control"), default_layout(), 10000.0, 120.0, 4);
    const ViewingGeometry g;
    const auto fx = build_scanpath(rec, {}, g).fixations;
    const auto base = derive_saccades(fx, g, {});
    REQUIRE(base.size() > 3);

    for (double k : {0.5, 2.0, 3.0}) {
        // Finer pixel grid over the same physical panel.
        ViewingGeometry fine = g;
        fine.screen_width_px = static_cast<int>(g.screen_width_px * k);
        fine.screen_height_px = static_cast<int>(g.screen_height_px * k);
        auto scaled = fx;
        for (auto& f : scaled) {
            f.centroid_x_px *= k;
            f.centroid_y_px *= k;
        }
        const auto a = derive_saccades(scaled, fine, {});

        // Bigger panel viewed from proportionally further away.
        ViewingGeometry far = g;
        far.screen_width_mm *= k;
        far.screen_height_mm *= k;
        far.viewing_distance_mm *= k;
        const auto b = derive_saccades(fx, far, {});

        REQUIRE(a.size() == base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(std::abs(a[i].amplitude_deg - base[i].amplitude_deg) < 1e-9);
            CHECK(std::abs(b[i].amplitude_deg - base[i].amplitude_deg) < 1e-9);
        }
    }
}

TEST_CASE("event CSV exports") {
    const std::vector<Fixation> fx{fixation_at(0, 100, 1.5, 2.25), fixation_at(200, 300, 40, 2.25)};
    const auto f = write_fixations_csv(fx);
    CHECK(f.rfind("start_ms,end_ms,cx,cy,n\n0,100,1.5,2.25,2\n", 0) == 0);
    const auto s = write_saccades_csv(derive_saccades(fx, {}, {}));
    CHECK(s.rfind("from,to,amplitude_deg,pass\n0,1,", 0) == 0);
    CHECK(s.find(",1\n") != std::string::npos);
}
