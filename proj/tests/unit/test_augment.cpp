#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "gazescreen/augment.hpp"
#include "gazescreen/error.hpp"
#include "gazescreen/events.hpp"
#include "gazescreen/render.hpp"
#include "gazescreen/rng.hpp"
#include "gazescreen/simulate.hpp"
#include "support.hpp"

using namespace gazescreen;

namespace {

RasterImage noise_image(int w, int h, std::uint64_t seed) {
    Pcg64 rng(seed);
    RasterImage img(w, h);
    for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.bounded(256));
    return img;
}

RasterImage rendered(std::uint64_t seed) {
    const char* names[] = {"anxious", "control", "depressive"};
    const auto rec = simulate_recording(preset_profiles().at(names[seed % 3]), default_layout(), 10000.0, 120.0, seed);
    RenderConfig cfg;
    cfg.output_size = 96;
    return render_scanpath(build_scanpath(rec, {}, {}), cfg);
}

bool alpha_equal(const RasterImage& a, const RasterImage& b) {
    for (std::size_t i = 3; i < a.data().size(); i += 4) {
        if (a.data()[i] != b.data()[i]) return false;
    }
    return true;
}

// Brute-force modal filter: count every colour in the clamped window.
RasterImage paint_oracle(const RasterImage& img, int r) {
    RasterImage out = img;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            std::map<std::uint32_t, int> counts;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const auto p = img.at(std::clamp(x + dx, 0, img.width() - 1), std::clamp(y + dy, 0, img.height() - 1));
                    ++counts[(std::uint32_t{p[0]} << 16) | (std::uint32_t{p[1]} << 8) | p[2]];
                }
            }
            std::uint32_t best = 0;
            int best_n = -1;
            for (const auto& [packed, n] : counts) {
                if (n > best_n) {  // map order is ascending, so ties keep the lowest
                    best = packed;
                    best_n = n;
                }
            }
            auto* q = out.pixel(x, y);
            q[0] = static_cast<std::uint8_t>(best >> 16);
            q[1] = static_cast<std::uint8_t>((best >> 8) & 0xFF);
            q[2] = static_cast<std::uint8_t>(best & 0xFF);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("op names and parsing") {
    std::vector<std::string> names;
    for (const auto& op : augmentation_bank()) names.push_back(op.name());
    CHECK(names == std::vector<std::string>{"negate", "canny10", "posterize2", "posterize4", "paint1", "paint3",
                                            "gamma100", "modulate140", "modulate160"});
    for (const auto& op : augmentation_bank()) {
        const auto back = parse_augment_op(op.name());
        REQUIRE(back.has_value());
        CHECK(back->kind == op.kind);
        CHECK(back->value == op.value);
    }
    CHECK_FALSE(parse_augment_op("blur3").has_value());
    CHECK_FALSE(parse_augment_op("posterize").has_value());
}

TEST_CASE("parameter validation") {
    const RasterImage img(4, 4);
    for (const auto& op : {AugmentOp::posterize(1), AugmentOp::paint(0), AugmentOp::gamma(0.0), AugmentOp::modulate(0.0),
                           AugmentOp::canny(0.0)}) {
        try {
            apply(op, img);
            FAIL("expected InvalidParameter for " << op.name());
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidParameter);
        }
    }
}

TEST_CASE("negate is an involution") {
    const auto img = noise_image(37, 23, 1);
    const auto once = apply(AugmentOp::negate(), img);
    CHECK(once.at(3, 4)[0] == 255 - img.at(3, 4)[0]);
    CHECK(apply(AugmentOp::negate(), once) == img);
}

TEST_CASE("posterize matches its formula") {
    const auto img = noise_image(64, 64, 2);
    for (int n : {2, 3, 4, 7}) {
        const auto out = apply(AugmentOp::posterize(n), img);
        for (std::size_t i = 0; i < img.data().size(); ++i) {
            const double c = img.data()[i];
            const auto want = (i % 4 == 3) ? img.data()[i]
                                           : static_cast<std::uint8_t>(std::round(
                                                 std::round(c * (n - 1) / 255.0) * 255.0 / (n - 1)));
            REQUIRE(out.data()[i] == want);
        }
    }
    for (std::size_t i = 0; i < img.data().size(); ++i) {
        if (i % 4 == 3) continue;
        const auto v = apply(AugmentOp::posterize(2), img).data()[i];
        REQUIRE((v == 0 || v == 255));
    }
    CHECK(apply(AugmentOp::posterize(256), img) == img);
}

TEST_CASE("gamma matches its formula") {
    const auto img = noise_image(32, 32, 3);
    CHECK(apply(AugmentOp::gamma(1.0), img) == img);
    const auto out = apply(AugmentOp::gamma(100.0), img);
    for (std::size_t i = 0; i < img.data().size(); ++i) {
        if (i % 4 == 3) continue;
        const double c = img.data()[i];
        REQUIRE(out.data()[i] == static_cast<std::uint8_t>(std::round(255.0 * std::pow(c / 255.0, 1.0 / 100.0))));
    }
}

TEST_CASE("modulate scales lightness only") {
    RasterImage gray(1, 1, {100, 100, 100, 255});
    CHECK(apply(AugmentOp::modulate(140), gray).at(0, 0) == Rgba{140, 140, 140, 255});
    CHECK(apply(AugmentOp::modulate(100), noise_image(16, 16, 4)) == noise_image(16, 16, 4));
    RasterImage red(1, 1, {200, 0, 0, 77});
    // L = 100/255 → 140/255 with hue 0 and full saturation.
    CHECK(apply(AugmentOp::modulate(140), red).at(0, 0) == Rgba{255, 25, 25, 77});
}

TEST_CASE("gamma and modulate preserve channel ordering") {
    const auto img = noise_image(64, 64, 5);
    for (const auto& op : {AugmentOp::gamma(100.0), AugmentOp::gamma(0.5), AugmentOp::modulate(140),
                           AugmentOp::modulate(160), AugmentOp::modulate(60)}) {
        const auto out = apply(op, img);
        for (std::size_t px = 0; px < img.data().size(); px += 4) {
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) {
                    if (img.data()[px + a] <= img.data()[px + b]) REQUIRE(out.data()[px + a] <= out.data()[px + b]);
                }
            }
        }
    }
    // Across pixels for a grey ramp.
    RasterImage ramp(256, 1);
    for (int x = 0; x < 256; ++x) ramp.set(x, 0, {static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(x),
                                                  static_cast<std::uint8_t>(x), 255});
    for (const auto& op : {AugmentOp::gamma(100.0), AugmentOp::modulate(160)}) {
        const auto out = apply(op, ramp);
        for (int x = 1; x < 256; ++x) REQUIRE(out.at(x - 1, 0)[0] <= out.at(x, 0)[0]);
    }
}

TEST_CASE("paint equals the brute-force modal filter") {
    // Few colours so that ties and real modes both occur.
    Pcg64 rng(6);
    RasterImage img(21, 17);
    const Rgba palette[] = {{0, 0, 0, 0}, {220, 30, 30, 200}, {10, 10, 10, 255}, {220, 30, 31, 255}};
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) img.set(x, y, palette[rng.bounded(4)]);
    }
    for (int r : {1, 2, 3}) {
        const auto got = apply(AugmentOp::paint(r), img);
        CHECK(got == paint_oracle(img, r));
        CHECK(alpha_equal(got, img));
    }
}

TEST_CASE("canny on a vertical step") {
    RasterImage img(32, 32, {0, 0, 0, 255});
    for (int y = 0; y < 32; ++y) {
        for (int x = 16; x < 32; ++x) img.set(x, y, {255, 255, 255, 255});
    }
    const auto edges = apply(AugmentOp::canny(10), img);
    std::set<int> columns;
    for (int y = 4; y < 28; ++y) {
        for (int x = 0; x < 32; ++x) {
            const auto p = edges.at(x, y);
            CHECK(p[3] == 255);
            CHECK((p[0] == 0 || p[0] == 255));
            if (p[0] == 255) columns.insert(x);
        }
    }
    // A thin line next to the step and nothing else.
    REQUIRE_FALSE(columns.empty());
    CHECK(columns.size() <= 2);
    CHECK(*columns.begin() >= 14);
    CHECK(*columns.rbegin() <= 17);

    const RasterImage flat(16, 16, {90, 90, 90, 255});
    CHECK(testing::count_if_pixels(apply(AugmentOp::canny(10), flat),
                                   [](const Rgba& p) { return p != Rgba{0, 0, 0, 255}; }) == 0);
}

TEST_CASE("bank on a fully transparent image") {
    const RasterImage clear(40, 30);
    const auto variants = augment_all(clear);
    REQUIRE(variants.size() == 9);
    for (std::size_t i = 0; i < variants.size(); ++i) {
        const auto& v = variants[i];
        if (augmentation_bank()[i].kind == AugmentOp::Kind::Canny) {
            CHECK(v == RasterImage(40, 30, {0, 0, 0, 255}));
        } else {
            CHECK(testing::count_if_pixels(v, [](const Rgba& p) { return p[3] != 0; }) == 0);
        }
    }
}

TEST_CASE("bank variants differ from rendered sources and keep alpha") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto src = rendered(seed);
        const auto variants = augment_all(src);
        REQUIRE(variants.size() == 9);
        for (std::size_t i = 0; i < variants.size(); ++i) {
            CHECK_MESSAGE(variants[i] != src, augmentation_bank()[i].name());
            if (augmentation_bank()[i].kind != AugmentOp::Kind::Canny) CHECK(alpha_equal(variants[i], src));
        }
        CHECK(augment_all(src) == variants);
    }
}
