#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gazescreen/gaze_io.hpp"
#include "gazescreen/geometry.hpp"

namespace gazescreen {

enum class OverlongPolicy { Drop, Truncate };

struct DetectionParams {
    double dispersion_threshold_deg = 1.0;
    double min_duration_ms = 80.0;
    double fixation_duration_min_ms = 80.0;
    double fixation_duration_max_ms = 1200.0;
    double max_saccade_amplitude_deg = 10.0;
    /// Longest interval between two consecutive valid samples that a window may span.
    double max_gap_ms = 75.0;
    OverlongPolicy overlong = OverlongPolicy::Drop;
};

void validate(const DetectionParams& params);

struct Fixation {
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    double centroid_x_px = 0.0;
    double centroid_y_px = 0.0;
    std::size_t n_samples = 0;
    /// Indices into the recording's sample list of the first and last member.
    std::size_t first_sample = 0;
    std::size_t last_sample = 0;

    std::int64_t duration_ms() const noexcept { return end_ms - start_ms; }

    friend bool operator==(const Fixation&, const Fixation&) = default;
};

struct Saccade {
    std::size_t from_fixation_index = 0;
    std::size_t to_fixation_index = 0;
    double amplitude_deg = 0.0;
    bool passes_filter = true;

    friend bool operator==(const Saccade&, const Saccade&) = default;
};

struct ScanPath {
    std::string participant_id;
    GroupLabel group = GroupLabel::Control;
    std::vector<Fixation> fixations;
    std::vector<Saccade> saccades;
    std::vector<Point> raw_polyline;
};

/// Number of samples in the bootstrap window: ceil(min_duration_ms · rate / 1000), at least 2.
std::size_t initial_window_samples(double min_duration_ms, double rate_hz);

/// Dispersion-threshold (I-DT) fixation detection.
///
/// Valid, on-screen samples are grouped into segments; two consecutive valid
/// samples further apart than `max_gap_ms` start a new segment, so short
/// tracker dropouts are bridged (absent from the centroid, present in the
/// duration) while long ones terminate any open window. Inside a segment the
/// window starts at `initial_window_samples` members; if its dispersion is
/// within the threshold it grows one sample at a time until the next sample
/// would exceed it, otherwise its start slides forward by one.
std::vector<Fixation> detect_fixations(const GazeRecording& rec, const DetectionParams& params,
                                       const ViewingGeometry& geom);

std::vector<Saccade> derive_saccades(const std::vector<Fixation>& fixations, const ViewingGeometry& geom,
                                     const DetectionParams& params);

/// Applies the [min, max] duration band. Over-long fixations are dropped or
/// cut back to `fixation_duration_max_ms` per `params.overlong`.
std::vector<Fixation> filter_durations(const std::vector<Fixation>& fixations, const GazeRecording& rec,
                                       const DetectionParams& params, const ViewingGeometry& geom = {});

ScanPath build_scanpath(const GazeRecording& rec, const DetectionParams& params, const ViewingGeometry& geom);

/// Total amplitude (degrees) of saccades that pass the amplitude filter.
double scanpath_length(const ScanPath& sp, const ViewingGeometry& geom);

std::string write_fixations_csv(const std::vector<Fixation>& fixations);
std::string write_saccades_csv(const std::vector<Saccade>& saccades);

}  // namespace gazescreen
