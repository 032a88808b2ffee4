#include "gazescreen/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gazescreen/error.hpp"

namespace gazescreen {

void validate(const ViewingGeometry& geom) {
    if (geom.screen_width_px <= 0 || geom.screen_height_px <= 0 || !(geom.screen_width_mm > 0.0) ||
        !(geom.screen_height_mm > 0.0) || !(geom.viewing_distance_mm > 0.0)) {
        throw Error(ErrorCode::InvalidGeometry, "all geometry fields must be strictly positive");
    }
    const double pitch_x = geom.screen_width_mm / geom.screen_width_px;
    const double pitch_y = geom.screen_height_mm / geom.screen_height_px;
    if (std::abs(pitch_x - pitch_y) > 0.02 * std::max(pitch_x, pitch_y)) {
        throw Error(ErrorCode::InvalidGeometry,
                    "non-square pixels: pitch " + std::to_string(pitch_x) + " vs " + std::to_string(pitch_y));
    }
}

double degrees_to_pixels(double angle_deg, const ViewingGeometry& geom) {
    validate(geom);
    if (!(angle_deg >= 0.0)) throw Error(ErrorCode::InvalidParameter, "angle must be non-negative");
    const double half = angle_deg * std::numbers::pi / 360.0;
    return 2.0 * geom.viewing_distance_mm * std::tan(half) / geom.pixel_pitch_mm();
}

double pixels_to_degrees(double dist_px, const ViewingGeometry& geom) {
    validate(geom);
    if (!(dist_px >= 0.0)) throw Error(ErrorCode::InvalidParameter, "distance must be non-negative");
    const double half = std::atan(dist_px * geom.pixel_pitch_mm() / (2.0 * geom.viewing_distance_mm));
    return half * 360.0 / std::numbers::pi;
}

double dispersion(std::span<const Point> points) {
    if (points.empty()) throw Error(ErrorCode::EmptyPointSet, "dispersion of an empty point set");
    auto [min_x, max_x] = std::minmax_element(points.begin(), points.end(),
                                              [](const Point& a, const Point& b) { return a.x < b.x; });
    auto [min_y, max_y] = std::minmax_element(points.begin(), points.end(),
                                              [](const Point& a, const Point& b) { return a.y < b.y; });
    return (max_x->x - min_x->x) + (max_y->y - min_y->y);
}

}  // namespace gazescreen
