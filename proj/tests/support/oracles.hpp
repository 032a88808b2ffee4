#pragma once

// Reference implementations used only by tests. They are written
// independently of the library code they check: naive, slow and direct.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gazescreen/events.hpp"
#include "gazescreen/gaze_io.hpp"
#include "gazescreen/geometry.hpp"

namespace oracle {

inline constexpr long double kPi = 3.141592653589793238462643383279502884L;

// Maclaurin series for sin/cos in long double; |x| ≤ π/4 converges fast.
inline long double sin_series(long double x) {
    long double term = x;
    long double sum = x;
    for (int k = 1; k < 40; ++k) {
        term *= -x * x / static_cast<long double>((2 * k) * (2 * k + 1));
        sum += term;
    }
    return sum;
}

inline long double cos_series(long double x) {
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int k = 1; k < 40; ++k) {
        term *= -x * x / static_cast<long double>((2 * k - 1) * (2 * k));
        sum += term;
    }
    return sum;
}

inline long double tan_series(long double x) { return sin_series(x) / cos_series(x); }

// atan by bisection on tan_series over (−π/2, π/2).
inline long double atan_bisect(long double v) {
    long double lo = -kPi / 2 + 1e-12L;
    long double hi = kPi / 2 - 1e-12L;
    for (int i = 0; i < 200; ++i) {
        const long double mid = (lo + hi) / 2;
        // tan_series loses accuracy far from 0, so compare via sin/cos directly.
        if (sin_series(mid) < v * cos_series(mid)) lo = mid; else hi = mid;
    }
    return (lo + hi) / 2;
}

inline double deg_to_px(double deg, double distance_mm, double pitch_mm) {
    const long double half = static_cast<long double>(deg) * kPi / 360.0L;
    return static_cast<double>(2.0L * distance_mm * tan_series(half) / pitch_mm);
}

inline double px_to_deg(double px, double distance_mm, double pitch_mm) {
    const long double v = static_cast<long double>(px) * pitch_mm / (2.0L * distance_mm);
    return static_cast<double>(2.0L * atan_bisect(v) * 360.0L / (2.0L * kPi));
}

struct RefFixation {
    std::int64_t start_ms;
    std::int64_t end_ms;
    double cx;
    double cy;
    std::size_t n;
};

// Brute-force I-DT. At every step the candidate window is re-read from the
// raw sample list and its dispersion recomputed from scratch.
inline std::vector<RefFixation> brute_force_idt(const gazescreen::GazeRecording& rec, double threshold_px,
                                                std::size_t window, double max_gap_ms, int screen_w, int screen_h) {
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        const auto& s = rec.samples[i];
        if (s.valid && s.x_px >= 0 && s.y_px >= 0 && s.x_px < screen_w && s.y_px < screen_h) usable.push_back(i);
    }
    auto sample = [&](std::size_t k) -> const gazescreen::GazeSample& { return rec.samples[usable[k]]; };
    auto spans_gap = [&](std::size_t a, std::size_t b) {
        for (std::size_t k = a; k < b; ++k) {
            if (static_cast<double>(sample(k + 1).t_ms - sample(k).t_ms) > max_gap_ms) return true;
        }
        return false;
    };
    auto disp = [&](std::size_t a, std::size_t b) {
        double x0 = sample(a).x_px, x1 = x0, y0 = sample(a).y_px, y1 = y0;
        for (std::size_t k = a; k <= b; ++k) {
            x0 = std::min(x0, sample(k).x_px);
            x1 = std::max(x1, sample(k).x_px);
            y0 = std::min(y0, sample(k).y_px);
            y1 = std::max(y1, sample(k).y_px);
        }
        return (x1 - x0) + (y1 - y0);
    };

    std::vector<RefFixation> out;
    std::size_t i = 0;
    while (i + window <= usable.size()) {
        std::size_t j = i + window - 1;
        if (spans_gap(i, j) || disp(i, j) > threshold_px) {
            ++i;
            continue;
        }
        while (j + 1 < usable.size() && !spans_gap(i, j + 1) && disp(i, j + 1) <= threshold_px) ++j;
        RefFixation f{sample(i).t_ms, sample(j).t_ms, 0.0, 0.0, j - i + 1};
        for (std::size_t k = i; k <= j; ++k) {
            f.cx += sample(k).x_px;
            f.cy += sample(k).y_px;
        }
        f.cx /= static_cast<double>(f.n);
        f.cy /= static_cast<double>(f.n);
        out.push_back(f);
        i = j + 1;
    }
    return out;
}

}  // namespace oracle
