#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "gazescreen/events.hpp"
#include "gazescreen/image.hpp"

namespace gazescreen {

enum class RenderStyle { FixationOverlay, RawPolyline };

std::string_view style_name(RenderStyle s) noexcept;  // "overlay" / "polyline"
std::optional<RenderStyle> parse_style(std::string_view name) noexcept;

struct RenderConfig {
    RenderStyle style = RenderStyle::FixationOverlay;
    int source_width_px = 1680;
    int source_height_px = 1050;
    /// 0 selects the style default: 224 for overlays, 448 for polylines.
    int output_size = 0;
    /// Alpha 0 means a transparent background.
    Rgba background = {0, 0, 0, 0};
    Rgba stroke_rgba = {220, 30, 30, 200};
    double stroke_width_px = 4.0;
    /// Fixation disc radius r = radius_min_px + radius_per_ms · duration, in source pixels.
    double radius_min_px = 4.0;
    double radius_per_ms = 0.02;
    std::uint8_t circle_alpha = 160;

    int resolved_output_size() const noexcept {
        if (output_size > 0) return output_size;
        return style == RenderStyle::FixationOverlay ? 224 : 448;
    }
};

void validate(const RenderConfig& cfg);

/// Draws the scan path at source-canvas resolution (no resampling).
RasterImage draw_canvas(const ScanPath& sp, const RenderConfig& cfg);

/// draw_canvas, then letterboxed resample onto a square output of the configured size.
RasterImage render_scanpath(const ScanPath& sp, const RenderConfig& cfg);

/// Separable bilinear (triangle-kernel) resampling to width × height. On
/// downscaling the kernel support widens with the scale factor so every
/// source pixel contributes; at scale 1 it reproduces the input exactly.
RasterImage resample(const RasterImage& img, int width, int height);

/// Aspect-preserving resample onto a target × target square; uncovered
/// bands take `fill` (transparent by default).
RasterImage resize(const RasterImage& img, int target, Rgba fill = {0, 0, 0, 0});

std::string render_filename(std::string_view participant_id, RenderStyle style);

}  // namespace gazescreen
