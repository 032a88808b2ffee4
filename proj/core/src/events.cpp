#include "gazescreen/events.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "gazescreen/error.hpp"

namespace gazescreen {

void validate(const DetectionParams& p) {
    if (!(p.dispersion_threshold_deg > 0) || !(p.min_duration_ms > 0) || !(p.fixation_duration_min_ms > 0) ||
        !(p.fixation_duration_max_ms > 0) || !(p.max_saccade_amplitude_deg > 0) || !(p.max_gap_ms > 0)) {
        throw Error(ErrorCode::InvalidParams, "detection thresholds must be strictly positive");
    }
    if (p.fixation_duration_min_ms > p.fixation_duration_max_ms) {
        throw Error(ErrorCode::InvalidParams, "fixation_duration_min_ms exceeds fixation_duration_max_ms");
    }
}

std::size_t initial_window_samples(double min_duration_ms, double rate_hz) {
    // Guard against 80 · 120 / 1000 landing a hair above an integer.
    const double n = std::ceil(min_duration_ms * rate_hz / 1000.0 - 1e-9);
    return std::max<std::size_t>(2, static_cast<std::size_t>(n));
}

namespace {

struct Member {
    std::size_t index;
    std::int64_t t_ms;
    double x;
    double y;
};

// Running bounding box over a window that only ever grows at its end.
struct Bounds {
    double min_x = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();

    void add(const Member& m) {
        min_x = std::min(min_x, m.x);
        max_x = std::max(max_x, m.x);
        min_y = std::min(min_y, m.y);
        max_y = std::max(max_y, m.y);
    }
    double spread() const { return (max_x - min_x) + (max_y - min_y); }
    double spread_with(const Member& m) const {
        return (std::max(max_x, m.x) - std::min(min_x, m.x)) + (std::max(max_y, m.y) - std::min(min_y, m.y));
    }
};

Fixation make_fixation(const std::vector<Member>& seg, std::size_t begin, std::size_t end) {
    Fixation f;
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
        sx += seg[k].x;
        sy += seg[k].y;
    }
    const auto n = static_cast<double>(end - begin);
    f.centroid_x_px = sx / n;
    f.centroid_y_px = sy / n;
    f.n_samples = end - begin;
    f.start_ms = seg[begin].t_ms;
    f.end_ms = seg[end - 1].t_ms;
    f.first_sample = seg[begin].index;
    f.last_sample = seg[end - 1].index;
    return f;
}

void detect_in_segment(const std::vector<Member>& seg, std::size_t window, double threshold_px,
                       std::vector<Fixation>& out) {
    std::size_t start = 0;
    while (start + window <= seg.size()) {
        Bounds box;
        for (std::size_t k = start; k < start + window; ++k) box.add(seg[k]);
        if (box.spread() > threshold_px) {
            ++start;
            continue;
        }
        std::size_t end = start + window;
        while (end < seg.size() && box.spread_with(seg[end]) <= threshold_px) box.add(seg[end++]);
        out.push_back(make_fixation(seg, start, end));
        start = end;
    }
}

bool on_screen(const GazeSample& s, const ViewingGeometry& geom) {
    return s.x_px >= 0.0 && s.y_px >= 0.0 && s.x_px < geom.screen_width_px && s.y_px < geom.screen_height_px;
}

}  // namespace

std::vector<Fixation> detect_fixations(const GazeRecording& rec, const DetectionParams& params,
                                       const ViewingGeometry& geom) {
    validate(params);
    validate(geom);
    if (rec.samples.empty()) throw Error(ErrorCode::EmptyRecording, "recording '" + rec.participant_id + "' has no samples");

    const double threshold_px = degrees_to_pixels(params.dispersion_threshold_deg, geom);
    const std::size_t window = initial_window_samples(params.min_duration_ms, rec.rate_hz);

    std::vector<Fixation> out;
    std::vector<Member> segment;
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        const auto& s = rec.samples[i];
        if (!s.valid || !on_screen(s, geom)) continue;
        if (!segment.empty() && static_cast<double>(s.t_ms - segment.back().t_ms) > params.max_gap_ms) {
            detect_in_segment(segment, window, threshold_px, out);
            segment.clear();
        }
        segment.push_back({i, s.t_ms, s.x_px, s.y_px});
    }
    detect_in_segment(segment, window, threshold_px, out);
    return out;
}

std::vector<Saccade> derive_saccades(const std::vector<Fixation>& fixations, const ViewingGeometry& geom,
                                     const DetectionParams& params) {
    std::vector<Saccade> out;
    if (fixations.size() < 2) return out;
    out.reserve(fixations.size() - 1);
    for (std::size_t i = 0; i + 1 < fixations.size(); ++i) {
        const auto& a = fixations[i];
        const auto& b = fixations[i + 1];
        const double dist = std::hypot(b.centroid_x_px - a.centroid_x_px, b.centroid_y_px - a.centroid_y_px);
        Saccade s;
        s.from_fixation_index = i;
        s.to_fixation_index = i + 1;
        s.amplitude_deg = pixels_to_degrees(dist, geom);
        s.passes_filter = s.amplitude_deg < params.max_saccade_amplitude_deg;
        out.push_back(s);
    }
    return out;
}

std::vector<Fixation> filter_durations(const std::vector<Fixation>& fixations, const GazeRecording& rec,
                                       const DetectionParams& params, const ViewingGeometry& geom) {
    std::vector<Fixation> out;
    for (const auto& f : fixations) {
        const auto d = static_cast<double>(f.duration_ms());
        if (d < params.fixation_duration_min_ms) continue;
        if (d <= params.fixation_duration_max_ms) {
            out.push_back(f);
            continue;
        }
        if (params.overlong == OverlongPolicy::Drop) continue;

        // Truncate: keep the leading members that fit the band and recompute the centroid.
        const double limit = static_cast<double>(f.start_ms) + params.fixation_duration_max_ms;
        Fixation t = f;
        double sx = 0.0;
        double sy = 0.0;
        std::size_t n = 0;
        for (std::size_t i = f.first_sample; i <= f.last_sample && i < rec.samples.size(); ++i) {
            const auto& s = rec.samples[i];
            if (static_cast<double>(s.t_ms) > limit) break;
            if (!s.valid || !on_screen(s, geom)) continue;
            sx += s.x_px;
            sy += s.y_px;
            ++n;
            t.end_ms = s.t_ms;
            t.last_sample = i;
        }
        if (n == 0) continue;
        t.n_samples = n;
        t.centroid_x_px = sx / static_cast<double>(n);
        t.centroid_y_px = sy / static_cast<double>(n);
        if (static_cast<double>(t.duration_ms()) >= params.fixation_duration_min_ms) out.push_back(t);
    }
    return out;
}

ScanPath build_scanpath(const GazeRecording& rec, const DetectionParams& params, const ViewingGeometry& geom) {
    ScanPath sp;
    sp.participant_id = rec.participant_id;
    sp.group = rec.group;
    sp.fixations = filter_durations(detect_fixations(rec, params, geom), rec, params, geom);
    sp.saccades = derive_saccades(sp.fixations, geom, params);
    sp.raw_polyline.reserve(rec.samples.size());
    for (const auto& s : rec.samples) {
        if (s.valid) sp.raw_polyline.push_back({s.x_px, s.y_px});
    }
    return sp;
}

double scanpath_length(const ScanPath& sp, const ViewingGeometry& geom) {
    validate(geom);
    double total = 0.0;
    if (sp.fixations.size() < 2) return total;
    for (const auto& s : sp.saccades) {
        if (s.passes_filter) total += s.amplitude_deg;
    }
    return total;
}

std::string write_fixations_csv(const std::vector<Fixation>& fixations) {
    std::string out = "start_ms,end_ms,cx,cy,n\n";
    for (const auto& f : fixations) {
        out += fmt::format("{},{},{},{},{}\n", f.start_ms, f.end_ms, f.centroid_x_px, f.centroid_y_px, f.n_samples);
    }
    return out;
}

std::string write_saccades_csv(const std::vector<Saccade>& saccades) {
    std::string out = "from,to,amplitude_deg,pass\n";
    for (const auto& s : saccades) {
        out += fmt::format("{},{},{},{}\n", s.from_fixation_index, s.to_fixation_index, s.amplitude_deg,
                           s.passes_filter ? 1 : 0);
    }
    return out;
}

}  // namespace gazescreen
