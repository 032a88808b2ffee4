#include "gazescreen/render.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gazescreen/error.hpp"

namespace gazescreen {

std::string_view style_name(RenderStyle s) noexcept {
    return s == RenderStyle::FixationOverlay ? "overlay" : "polyline";
}

std::optional<RenderStyle> parse_style(std::string_view name) noexcept {
    if (name == "overlay" || name == "fixation_overlay" || name == "A") return RenderStyle::FixationOverlay;
    if (name == "polyline" || name == "raw_polyline" || name == "B") return RenderStyle::RawPolyline;
    return std::nullopt;
}

void validate(const RenderConfig& cfg) {
    if (cfg.source_width_px <= 0 || cfg.source_height_px <= 0) {
        throw Error(ErrorCode::InvalidConfig, "source canvas must be positive");
    }
    if (cfg.resolved_output_size() < 32) throw Error(ErrorCode::InvalidConfig, "output_size must be at least 32");
    if (!(cfg.radius_min_px > 0.0)) throw Error(ErrorCode::InvalidConfig, "radius_min_px must be positive");
    if (!(cfg.radius_per_ms >= 0.0)) throw Error(ErrorCode::InvalidConfig, "radius_per_ms must be non-negative");
    if (!(cfg.stroke_width_px > 0.0)) throw Error(ErrorCode::InvalidConfig, "stroke_width_px must be positive");
}

namespace {

// Coverage mask over the canvas; primitives are unioned before compositing so
// overlapping strokes do not darken.
class Mask {
public:
    Mask(int w, int h) : w_(w), h_(h), bits_(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0) {}

    void disc(double cx, double cy, double r) {
        const int x0 = std::max(0, static_cast<int>(std::floor(cx - r)));
        const int x1 = std::min(w_ - 1, static_cast<int>(std::ceil(cx + r)));
        const int y0 = std::max(0, static_cast<int>(std::floor(cy - r)));
        const int y1 = std::min(h_ - 1, static_cast<int>(std::ceil(cy + r)));
        const double r2 = r * r;
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double dx = x + 0.5 - cx;
                const double dy = y + 0.5 - cy;
                if (dx * dx + dy * dy <= r2) mark(x, y);
            }
        }
    }

    void segment(Point a, Point b, double width) {
        const double half = width / 2.0;
        const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - half)));
        const int x1 = std::min(w_ - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + half)));
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - half)));
        const int y1 = std::min(h_ - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + half)));
        const double vx = b.x - a.x;
        const double vy = b.y - a.y;
        const double len2 = vx * vx + vy * vy;
        const double half2 = half * half;
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double px = x + 0.5 - a.x;
                const double py = y + 0.5 - a.y;
                double t = len2 > 0.0 ? (px * vx + py * vy) / len2 : 0.0;
                t = std::clamp(t, 0.0, 1.0);
                const double dx = px - t * vx;
                const double dy = py - t * vy;
                if (dx * dx + dy * dy <= half2) mark(x, y);
            }
        }
    }

    void composite(RasterImage& img, Rgba color) const {
        const double src_a = color[3] / 255.0;
        for (int y = 0; y < h_; ++y) {
            for (int x = 0; x < w_; ++x) {
                if (!bits_[static_cast<std::size_t>(y) * w_ + x]) continue;
                auto* p = img.pixel(x, y);
                const double dst_a = p[3] / 255.0;
                const double out_a = src_a + dst_a * (1.0 - src_a);
                if (out_a <= 0.0) continue;
                for (int c = 0; c < 3; ++c) {
                    const double v = (color[c] * src_a + p[c] * dst_a * (1.0 - src_a)) / out_a;
                    p[c] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
                }
                p[3] = static_cast<std::uint8_t>(std::clamp(std::lround(out_a * 255.0), 0L, 255L));
            }
        }
    }

private:
    void mark(int x, int y) { bits_[static_cast<std::size_t>(y) * w_ + x] = 1; }

    int w_;
    int h_;
    std::vector<std::uint8_t> bits_;
};

}  // namespace

RasterImage draw_canvas(const ScanPath& sp, const RenderConfig& cfg) {
    validate(cfg);
    RasterImage canvas(cfg.source_width_px, cfg.source_height_px, cfg.background);
    const Rgba stroke = cfg.stroke_rgba;

    if (cfg.style == RenderStyle::FixationOverlay) {
        Mask discs(canvas.width(), canvas.height());
        for (const auto& f : sp.fixations) {
            const double r = cfg.radius_min_px + cfg.radius_per_ms * static_cast<double>(f.duration_ms());
            discs.disc(f.centroid_x_px, f.centroid_y_px, r);
        }
        discs.composite(canvas, {stroke[0], stroke[1], stroke[2], cfg.circle_alpha});

        Mask lines(canvas.width(), canvas.height());
        for (const auto& s : sp.saccades) {
            if (!s.passes_filter) continue;
            const auto& a = sp.fixations.at(s.from_fixation_index);
            const auto& b = sp.fixations.at(s.to_fixation_index);
            lines.segment({a.centroid_x_px, a.centroid_y_px}, {b.centroid_x_px, b.centroid_y_px}, cfg.stroke_width_px);
        }
        lines.composite(canvas, stroke);
    } else {
        Mask lines(canvas.width(), canvas.height());
        if (sp.raw_polyline.size() == 1) {
            lines.disc(sp.raw_polyline[0].x, sp.raw_polyline[0].y, cfg.stroke_width_px / 2.0);
        }
        for (std::size_t i = 1; i < sp.raw_polyline.size(); ++i) {
            lines.segment(sp.raw_polyline[i - 1], sp.raw_polyline[i], cfg.stroke_width_px);
        }
        lines.composite(canvas, stroke);
    }
    return canvas;
}

namespace {

struct Taps {
    int first = 0;
    std::vector<double> weights;
};

std::vector<Taps> triangle_taps(int in_size, int out_size) {
    std::vector<Taps> taps(static_cast<std::size_t>(out_size));
    const double scale = static_cast<double>(in_size) / out_size;
    const double support = std::max(1.0, scale);
    for (int o = 0; o < out_size; ++o) {
        const double center = (o + 0.5) * scale;
        const int lo = std::max(0, static_cast<int>(std::floor(center - support)));
        const int hi = std::min(in_size - 1, static_cast<int>(std::ceil(center + support)));
        auto& t = taps[static_cast<std::size_t>(o)];
        t.first = lo;
        double total = 0.0;
        for (int s = lo; s <= hi; ++s) {
            const double w = std::max(0.0, 1.0 - std::abs(s + 0.5 - center) / support);
            t.weights.push_back(w);
            total += w;
        }
        if (total <= 0.0) {
            // Degenerate upscale edge: nearest sample.
            t.weights.assign(t.weights.size(), 0.0);
            const int nearest = std::clamp(static_cast<int>(center), lo, hi);
            t.weights[static_cast<std::size_t>(nearest - lo)] = 1.0;
            total = 1.0;
        }
        for (double& w : t.weights) w /= total;
    }
    return taps;
}

}  // namespace

RasterImage resample(const RasterImage& img, int width, int height) {
    if (img.empty() || width < 1 || height < 1) throw Error(ErrorCode::InvalidConfig, "resample target must be positive");
    if (width == img.width() && height == img.height()) return img;

    const auto htaps = triangle_taps(img.width(), width);
    const auto vtaps = triangle_taps(img.height(), height);

    // Horizontal pass into a double buffer (img.height × width × 4).
    std::vector<double> tmp(static_cast<std::size_t>(img.height()) * width * 4, 0.0);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < width; ++x) {
            const auto& t = htaps[static_cast<std::size_t>(x)];
            double acc[4] = {0, 0, 0, 0};
            for (std::size_t k = 0; k < t.weights.size(); ++k) {
                const auto* p = img.pixel(t.first + static_cast<int>(k), y);
                for (int c = 0; c < 4; ++c) acc[c] += t.weights[k] * p[c];
            }
            double* dst = &tmp[(static_cast<std::size_t>(y) * width + x) * 4];
            for (int c = 0; c < 4; ++c) dst[c] = acc[c];
        }
    }
    RasterImage out(width, height);
    for (int y = 0; y < height; ++y) {
        const auto& t = vtaps[static_cast<std::size_t>(y)];
        for (int x = 0; x < width; ++x) {
            double acc[4] = {0, 0, 0, 0};
            for (std::size_t k = 0; k < t.weights.size(); ++k) {
                const double* src = &tmp[(static_cast<std::size_t>(t.first + static_cast<int>(k)) * width + x) * 4];
                for (int c = 0; c < 4; ++c) acc[c] += t.weights[k] * src[c];
            }
            auto* p = out.pixel(x, y);
            for (int c = 0; c < 4; ++c) p[c] = static_cast<std::uint8_t>(std::clamp(std::lround(acc[c]), 0L, 255L));
        }
    }
    return out;
}

RasterImage resize(const RasterImage& img, int target, Rgba fill) {
    if (target < 1) throw Error(ErrorCode::InvalidConfig, "resize target must be at least 1");
    if (img.width() == img.height()) return resample(img, target, target);
    int w = target;
    int h = target;
    if (img.width() > img.height()) {
        h = std::max(1, static_cast<int>(std::lround(static_cast<double>(target) * img.height() / img.width())));
    } else {
        w = std::max(1, static_cast<int>(std::lround(static_cast<double>(target) * img.width() / img.height())));
    }
    const RasterImage inner = resample(img, w, h);
    RasterImage out(target, target, fill);
    const int ox = (target - w) / 2;
    const int oy = (target - h) / 2;
    for (int y = 0; y < h; ++y) {
        std::copy_n(inner.pixel(0, y), static_cast<std::size_t>(w) * 4, out.pixel(ox, oy + y));
    }
    return out;
}

RasterImage render_scanpath(const ScanPath& sp, const RenderConfig& cfg) {
    return resize(draw_canvas(sp, cfg), cfg.resolved_output_size(), cfg.background);
}

std::string render_filename(std::string_view participant_id, RenderStyle style) {
    return std::string(participant_id) + "__" + std::string(style_name(style)) + ".png";
}

}  // namespace gazescreen
