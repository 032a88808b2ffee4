#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gazescreen {

/// Diagnostic groups in canonical (alphabetical) order; the enum value is the
/// class index used by every confusion matrix and classifier head.
enum class GroupLabel : int { Anxious = 0, Control = 1, Depressive = 2 };

inline constexpr int kGroupCount = 3;

std::string_view group_name(GroupLabel g) noexcept;    // "anxious"
std::string_view group_letter(GroupLabel g) noexcept;  // "A"
std::optional<GroupLabel> parse_group(std::string_view name) noexcept;
inline int group_index(GroupLabel g) noexcept { return static_cast<int>(g); }
GroupLabel group_from_index(int index);

struct GazeSample {
    std::int64_t t_ms = 0;
    double x_px = 0.0;
    double y_px = 0.0;
    bool valid = true;

    friend bool operator==(const GazeSample&, const GazeSample&) = default;
};

struct ParticipantMeta {
    std::optional<double> cesd_score;
    std::optional<double> lsas_score;
    std::optional<double> age;
    std::optional<std::string> sex;

    friend bool operator==(const ParticipantMeta&, const ParticipantMeta&) = default;
};

struct GazeRecording {
    std::string participant_id;
    GroupLabel group = GroupLabel::Control;
    double rate_hz = 120.0;
    std::vector<GazeSample> samples;
    ParticipantMeta meta;

    friend bool operator==(const GazeRecording&, const GazeRecording&) = default;
};

/// Parses the `t_ms,x_px,y_px,valid` CSV body. Identity fields come from the
/// metadata sidecar; this fills samples only and leaves the rest default.
std::vector<GazeSample> parse_gaze_samples(std::string_view text);

/// CSV + metadata in one call; `meta_json` is the sidecar document.
GazeRecording parse_gaze_csv(std::string_view csv_text, std::string_view meta_json);
GazeRecording parse_gaze_csv(std::string_view csv_text);

std::string write_gaze_csv(const GazeRecording& rec);
std::string write_gaze_meta(const GazeRecording& rec);

/// Applies a sidecar JSON object onto `rec` (participant_id, group, rate_hz, optional scores).
void apply_gaze_meta(GazeRecording& rec, std::string_view meta_json);

/// Median inter-sample interval within ±20% of the nominal period.
bool has_nominal_rate(const GazeRecording& rec) noexcept;

/// Reads `<stem>.csv` and `<stem>.meta.json`.
GazeRecording read_recording(const std::filesystem::path& csv_path);
/// Writes `<dir>/<participant_id>.csv` and its sidecar; returns the CSV path.
std::filesystem::path write_recording(const GazeRecording& rec, const std::filesystem::path& dir);
std::filesystem::path meta_path_for(const std::filesystem::path& csv_path);

}  // namespace gazescreen
