#pragma once

#include <span>

namespace gazescreen {

/// Physical viewing setup. Defaults: 1680×1050 px panel of 473.76×296.1 mm
/// (0.282 mm pitch) viewed from 600 mm.
struct ViewingGeometry {
    int screen_width_px = 1680;
    int screen_height_px = 1050;
    double screen_width_mm = 473.76;
    double screen_height_mm = 296.1;
    double viewing_distance_mm = 600.0;

    double pixel_pitch_mm() const noexcept { return screen_width_mm / screen_width_px; }
};

/// Throws InvalidGeometry unless every field is positive and pixels are square within 2%.
void validate(const ViewingGeometry& geom);

double degrees_to_pixels(double angle_deg, const ViewingGeometry& geom);
double pixels_to_degrees(double dist_px, const ViewingGeometry& geom);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// I-DT dispersion: (max x − min x) + (max y − min y). Throws EmptyPointSet.
double dispersion(std::span<const Point> points);

}  // namespace gazescreen
