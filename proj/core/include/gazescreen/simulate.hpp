#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gazescreen/gaze_io.hpp"

namespace gazescreen {

enum class Emotion : int { Neutral = 0, Sad = 1, Angry = 2, Happy = 3 };

inline constexpr int kEmotionCount = 4;

std::string_view emotion_name(Emotion e) noexcept;
std::optional<Emotion> parse_emotion(std::string_view name) noexcept;

struct Aoi {
    double x = 0.0;
    double y = 0.0;
    double width = 0.0;
    double height = 0.0;
    Emotion emotion = Emotion::Neutral;

    double center_x() const noexcept { return x + width / 2.0; }
    double center_y() const noexcept { return y + height / 2.0; }
    bool contains(double px, double py) const noexcept {
        return px >= x && px < x + width && py >= y && py < y + height;
    }
};

/// Four face regions in a 2×2 grid, listed top-left, top-right, bottom-left, bottom-right.
struct SlideLayout {
    int canvas_width_px = 1680;
    int canvas_height_px = 1050;
    std::array<Aoi, 4> aois{};

    /// AOI showing `e`.
    const Aoi& aoi_for(Emotion e) const;
    /// Index of the AOI containing the point, if any.
    std::optional<std::size_t> locate(double px, double py) const noexcept;
};

void validate(const SlideLayout& layout);

/// 700×420 px AOIs centred in the quadrants of a 1680×1050 canvas. Without a
/// seed the assignment is neutral, sad, angry, happy in reading order; a seed
/// permutes the emotion tags over the same rectangles.
SlideLayout default_layout(std::optional<std::uint64_t> permutation_seed = std::nullopt);

struct BiasProfile {
    std::string name;
    GroupLabel group = GroupLabel::Control;
    /// Indexed by Emotion.
    std::array<double, kEmotionCount> dwell_weights{1.0, 1.0, 1.0, 1.0};
    std::array<double, kEmotionCount> fixation_mean_ms{300.0, 300.0, 300.0, 300.0};
    std::array<double, kEmotionCount> fixation_sd_ms{100.0, 100.0, 100.0, 100.0};
    double sad_disengage_bonus_ms = 0.0;
    double hyperscan_rate = 1.0;
    double jitter_px = 1.5;
    double transition_ms = 30.0;
    double scatter_px = 40.0;

    /// Normalized selection probability of each emotion.
    std::array<double, kEmotionCount> selection_probabilities() const;
};

void validate(const BiasProfile& profile);

/// control, depressive and anxious presets.
std::map<std::string, BiasProfile> preset_profiles();

BiasProfile profile_from_json(std::string_view json_text);
std::string profile_to_json(const BiasProfile& profile);

/// Ground truth for one generated fixation episode.
struct FixationEpisode {
    double start_ms = 0.0;
    double end_ms = 0.0;
    double target_x = 0.0;
    double target_y = 0.0;
    std::size_t aoi = 0;
    Emotion emotion = Emotion::Neutral;
};

struct SimulatedTrial {
    GazeRecording recording;
    std::vector<FixationEpisode> episodes;
};

/// Alternating fixation episodes and linear saccade transitions sampled at
/// `rate_hz` with Gaussian jitter. Each episode picks an AOI by the profile's
/// weights (or, with probability 1 − 1/hyperscan_rate, re-fixates the current
/// one), targets a Gaussian-scattered point inside it, and dwells
/// clamp(Normal(mean, sd), 90, 1100) ms plus the sad bonus, divided by hyperscan_rate.
SimulatedTrial simulate_trial(const BiasProfile& profile, const SlideLayout& layout, double duration_ms,
                              double rate_hz, std::uint64_t seed);

GazeRecording simulate_recording(const BiasProfile& profile, const SlideLayout& layout, double duration_ms,
                                 double rate_hz, std::uint64_t seed);

/// `n` recordings with ids `<profile>-NNN` and per-participant seeds derived from `seed`.
std::vector<GazeRecording> simulate_cohort(const BiasProfile& profile, std::size_t n, std::uint64_t seed,
                                           const SlideLayout& layout = default_layout(), double duration_ms = 10000.0,
                                           double rate_hz = 120.0);

}  // namespace gazescreen
