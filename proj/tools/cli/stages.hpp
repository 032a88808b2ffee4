#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gazescreen/events.hpp"
#include "gazescreen/gaze_io.hpp"
#include "gazescreen/geometry.hpp"
#include "gazescreen/image.hpp"
#include "gazescreen/render.hpp"

namespace gazescreen::cli {

namespace fs = std::filesystem;

/// Regular files in `dir` (non-recursive) ending in `suffix`, sorted by name.
std::vector<fs::path> list_files(const fs::path& dir, std::string_view suffix);

/// Gaze CSVs in `dir`, skipping event exports.
std::vector<fs::path> list_gaze_files(const fs::path& dir);

void write_text(const fs::path& path, std::string_view text);
std::string read_text(const fs::path& path);

/// Writes the CSV and its sidecar; returns both paths.
std::vector<fs::path> write_recording_files(const GazeRecording& rec, const fs::path& dir);

/// `<pid>.fixations.csv` and `<pid>.saccades.csv` in `dir`.
std::vector<fs::path> export_events(const GazeRecording& rec, const DetectionParams& params,
                                    const ViewingGeometry& geom, const fs::path& dir);

/// `<pid>__<style>.png` plus a label sidecar.
std::vector<fs::path> render_recording(const GazeRecording& rec, const DetectionParams& params,
                                       const ViewingGeometry& geom, const RenderConfig& cfg, const fs::path& dir);

/// Label sidecar next to an image: participant id, group and optional augment op.
void write_image_sidecar(const fs::path& png, const std::string& participant_id, GroupLabel group,
                         const std::optional<std::string>& augment_op = std::nullopt);

/// Writes the nine bank variants `<stem>__<op>.png` of `png` into `dir`, and the
/// source itself when `include_source`. Labels follow the source sidecar.
std::vector<fs::path> augment_image(const fs::path& png, const fs::path& dir, bool include_source);

}  // namespace gazescreen::cli
