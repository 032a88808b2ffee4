#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "gazescreen/gaze_io.hpp"
#include "gazescreen/image.hpp"
#include "gazescreen/rng.hpp"

namespace testing {

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("gazescreen-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// Regular 120 Hz timestamps, all samples at (x, y).
inline gazescreen::GazeRecording constant_recording(std::size_t n, double x, double y, double rate_hz = 120.0) {
    gazescreen::GazeRecording rec;
    rec.participant_id = "p";
    rec.rate_hz = rate_hz;
    for (std::size_t k = 0; k < n; ++k) {
        rec.samples.push_back({static_cast<std::int64_t>(std::llround(static_cast<double>(k) * 1000.0 / rate_hz)), x, y, true});
    }
    return rec;
}

// Marks random runs of samples invalid and pushes a few off-screen.
inline void add_dropouts(gazescreen::GazeRecording& rec, std::uint64_t seed) {
    gazescreen::Pcg64 rng(seed);
    const auto n = rec.samples.size();
    const auto runs = rng.bounded(6);
    for (std::uint64_t r = 0; r < runs; ++r) {
        const auto start = rng.bounded(n);
        const auto len = 1 + rng.bounded(20);
        for (std::uint64_t k = start; k < std::min<std::uint64_t>(n, start + len); ++k) rec.samples[k].valid = false;
    }
    const auto off = rng.bounded(4);
    for (std::uint64_t r = 0; r < off; ++r) rec.samples[rng.bounded(n)].x_px = 1700.0;
}

inline std::size_t count_if_pixels(const gazescreen::RasterImage& img, auto pred) {
    std::size_t n = 0;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (pred(img.at(x, y))) ++n;
        }
    }
    return n;
}

}  // namespace testing
