#include "gazescreen/simulate.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "gazescreen/error.hpp"
#include "gazescreen/rng.hpp"

namespace gazescreen {

std::string_view emotion_name(Emotion e) noexcept {
    switch (e) {
        case Emotion::Neutral: return "neutral";
        case Emotion::Sad: return "sad";
        case Emotion::Angry: return "angry";
        case Emotion::Happy: return "happy";
    }
    return "neutral";
}

std::optional<Emotion> parse_emotion(std::string_view name) noexcept {
    for (int i = 0; i < kEmotionCount; ++i) {
        if (emotion_name(static_cast<Emotion>(i)) == name) return static_cast<Emotion>(i);
    }
    return std::nullopt;
}

const Aoi& SlideLayout::aoi_for(Emotion e) const {
    for (const auto& a : aois) {
        if (a.emotion == e) return a;
    }
    throw Error(ErrorCode::InvalidConfig, "layout has no AOI for " + std::string(emotion_name(e)));
}

std::optional<std::size_t> SlideLayout::locate(double px, double py) const noexcept {
    for (std::size_t i = 0; i < aois.size(); ++i) {
        if (aois[i].contains(px, py)) return i;
    }
    return std::nullopt;
}

void validate(const SlideLayout& layout) {
    std::array<int, kEmotionCount> seen{};
    for (std::size_t i = 0; i < layout.aois.size(); ++i) {
        const auto& a = layout.aois[i];
        if (!(a.width > 0 && a.height > 0) || a.x < 0 || a.y < 0 || a.x + a.width > layout.canvas_width_px ||
            a.y + a.height > layout.canvas_height_px) {
            throw Error(ErrorCode::InvalidConfig, "AOI outside the canvas");
        }
        ++seen[static_cast<std::size_t>(a.emotion)];
        for (std::size_t j = 0; j < i; ++j) {
            const auto& b = layout.aois[j];
            const bool disjoint = a.x + a.width <= b.x || b.x + b.width <= a.x || a.y + a.height <= b.y ||
                                  b.y + b.height <= a.y;
            if (!disjoint) throw Error(ErrorCode::InvalidConfig, "AOIs overlap");
        }
    }
    for (int count : seen) {
        if (count != 1) throw Error(ErrorCode::InvalidConfig, "each emotion must appear exactly once");
    }
}

SlideLayout default_layout(std::optional<std::uint64_t> permutation_seed) {
    SlideLayout layout;
    std::array<Emotion, 4> tags = {Emotion::Neutral, Emotion::Sad, Emotion::Angry, Emotion::Happy};
    if (permutation_seed) {
        Pcg64 rng(*permutation_seed);
        std::vector<Emotion> v(tags.begin(), tags.end());
        rng.shuffle(v);
        std::copy(v.begin(), v.end(), tags.begin());
    }
    constexpr double kWidth = 700.0;
    constexpr double kHeight = 420.0;
    const double qw = layout.canvas_width_px / 2.0;
    const double qh = layout.canvas_height_px / 2.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double cx = qw * (static_cast<double>(i % 2) + 0.5);
        const double cy = qh * (static_cast<double>(i / 2) + 0.5);
        layout.aois[i] = {cx - kWidth / 2.0, cy - kHeight / 2.0, kWidth, kHeight, tags[i]};
    }
    return layout;
}

std::array<double, kEmotionCount> BiasProfile::selection_probabilities() const {
    double total = 0.0;
    for (double w : dwell_weights) total += w;
    std::array<double, kEmotionCount> p{};
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = dwell_weights[i] / total;
    return p;
}

void validate(const BiasProfile& p) {
    double total = 0.0;
    for (double w : p.dwell_weights) {
        if (!(w >= 0.0)) throw Error(ErrorCode::InvalidProfile, p.name + ": dwell weights must be non-negative");
        total += w;
    }
    if (!(total > 0.0)) throw Error(ErrorCode::InvalidProfile, p.name + ": dwell weights sum to zero");
    for (std::size_t i = 0; i < kEmotionCount; ++i) {
        if (!(p.fixation_mean_ms[i] > 0.0) || !(p.fixation_sd_ms[i] >= 0.0)) {
            throw Error(ErrorCode::InvalidProfile, p.name + ": fixation duration parameters must be positive");
        }
    }
    if (!(p.hyperscan_rate >= 1.0)) throw Error(ErrorCode::InvalidProfile, p.name + ": hyperscan_rate must be >= 1");
    if (!(p.sad_disengage_bonus_ms >= 0.0) || !(p.jitter_px >= 0.0) || !(p.transition_ms > 0.0) ||
        !(p.scatter_px >= 0.0)) {
        throw Error(ErrorCode::InvalidProfile, p.name + ": bonus, jitter and scatter must be non-negative, transition positive");
    }
}

std::map<std::string, BiasProfile> preset_profiles() {
    std::map<std::string, BiasProfile> out;

    BiasProfile control;
    control.name = "control";
    control.group = GroupLabel::Control;
    control.dwell_weights = {1.0, 0.8, 0.8, 1.4};
    out.emplace(control.name, control);

    BiasProfile depressive;
    depressive.name = "depressive";
    depressive.group = GroupLabel::Depressive;
    depressive.dwell_weights = {1.0, 1.8, 1.2, 0.7};
    depressive.sad_disengage_bonus_ms = 150.0;
    out.emplace(depressive.name, depressive);

    BiasProfile anxious;
    anxious.name = "anxious";
    anxious.group = GroupLabel::Anxious;
    anxious.dwell_weights = {1.0, 1.0, 1.6, 0.9};
    anxious.hyperscan_rate = 1.6;
    out.emplace(anxious.name, anxious);

    return out;
}

namespace {

nlohmann::json emotion_map(const std::array<double, kEmotionCount>& values) {
    nlohmann::json j = nlohmann::json::object();
    for (int i = 0; i < kEmotionCount; ++i) j[std::string(emotion_name(static_cast<Emotion>(i)))] = values[static_cast<std::size_t>(i)];
    return j;
}

void read_emotion_map(const nlohmann::json& j, std::array<double, kEmotionCount>& out) {
    if (j.is_number()) {
        out.fill(j.get<double>());
        return;
    }
    for (const auto& [key, value] : j.items()) {
        auto e = parse_emotion(key);
        if (!e) throw Error(ErrorCode::InvalidProfile, "unknown emotion '" + key + "'");
        out[static_cast<std::size_t>(*e)] = value.get<double>();
    }
}

}  // namespace

BiasProfile profile_from_json(std::string_view json_text) {
    BiasProfile p;
    try {
        auto j = nlohmann::json::parse(json_text);
        // A preset name as base lets files override only a few fields.
        if (j.contains("base")) {
            auto presets = preset_profiles();
            auto it = presets.find(j["base"].get<std::string>());
            if (it == presets.end()) throw Error(ErrorCode::InvalidProfile, "unknown base profile");
            p = it->second;
        }
        p.name = j.value("name", p.name);
        if (j.contains("group")) {
            auto g = parse_group(j["group"].get<std::string>());
            if (!g) throw Error(ErrorCode::InvalidProfile, "unknown group");
            p.group = *g;
        } else if (auto g = parse_group(p.name)) {
            p.group = *g;
        }
        if (j.contains("dwell_weights")) read_emotion_map(j["dwell_weights"], p.dwell_weights);
        if (j.contains("fixation_mean_ms")) read_emotion_map(j["fixation_mean_ms"], p.fixation_mean_ms);
        if (j.contains("fixation_sd_ms")) read_emotion_map(j["fixation_sd_ms"], p.fixation_sd_ms);
        p.sad_disengage_bonus_ms = j.value("sad_disengage_bonus_ms", p.sad_disengage_bonus_ms);
        p.hyperscan_rate = j.value("hyperscan_rate", p.hyperscan_rate);
        p.jitter_px = j.value("jitter_px", p.jitter_px);
        p.transition_ms = j.value("transition_ms", p.transition_ms);
        p.scatter_px = j.value("scatter_px", p.scatter_px);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidProfile, e.what());
    }
    if (p.name.empty()) throw Error(ErrorCode::InvalidProfile, "profile needs a name");
    validate(p);
    return p;
}

std::string profile_to_json(const BiasProfile& p) {
    nlohmann::ordered_json j;
    j["name"] = p.name;
    j["group"] = std::string(group_name(p.group));
    j["dwell_weights"] = emotion_map(p.dwell_weights);
    j["fixation_mean_ms"] = emotion_map(p.fixation_mean_ms);
    j["fixation_sd_ms"] = emotion_map(p.fixation_sd_ms);
    j["sad_disengage_bonus_ms"] = p.sad_disengage_bonus_ms;
    j["hyperscan_rate"] = p.hyperscan_rate;
    j["jitter_px"] = p.jitter_px;
    j["transition_ms"] = p.transition_ms;
    j["scatter_px"] = p.scatter_px;
    return j.dump(2) + "\n";
}

SimulatedTrial simulate_trial(const BiasProfile& profile, const SlideLayout& layout, double duration_ms,
                              double rate_hz, std::uint64_t seed) {
    validate(profile);
    validate(layout);
    if (!(duration_ms > 0.0) || !(rate_hz > 0.0)) {
        throw Error(ErrorCode::InvalidProfile, "duration and rate must be positive");
    }
    Pcg64 rng(seed);
    const std::vector<double> weights(profile.dwell_weights.begin(), profile.dwell_weights.end());
    const double stay_probability = 1.0 - 1.0 / profile.hyperscan_rate;

    SimulatedTrial trial;
    auto& episodes = trial.episodes;
    double cursor = 0.0;
    while (cursor < duration_ms) {
        std::size_t aoi_index = 0;
        if (!episodes.empty() && rng.uniform() < stay_probability) {
            aoi_index = episodes.back().aoi;
        } else {
            const auto emotion = static_cast<Emotion>(rng.categorical(weights));
            const auto& target = layout.aoi_for(emotion);
            aoi_index = static_cast<std::size_t>(&target - layout.aois.data());
        }
        const Aoi& aoi = layout.aois[aoi_index];
        const auto e = static_cast<std::size_t>(aoi.emotion);
        double dwell = std::clamp(rng.normal(profile.fixation_mean_ms[e], profile.fixation_sd_ms[e]), 90.0, 1100.0);
        if (aoi.emotion == Emotion::Sad) dwell += profile.sad_disengage_bonus_ms;
        dwell /= profile.hyperscan_rate;

        FixationEpisode ep;
        ep.aoi = aoi_index;
        ep.emotion = aoi.emotion;
        ep.target_x = std::clamp(aoi.center_x() + rng.normal(0.0, profile.scatter_px), aoi.x, aoi.x + aoi.width - 1.0);
        ep.target_y = std::clamp(aoi.center_y() + rng.normal(0.0, profile.scatter_px), aoi.y, aoi.y + aoi.height - 1.0);
        ep.start_ms = episodes.empty() ? 0.0 : episodes.back().end_ms + profile.transition_ms;
        ep.end_ms = ep.start_ms + dwell;
        cursor = ep.end_ms + profile.transition_ms;
        episodes.push_back(ep);
    }

    auto& rec = trial.recording;
    rec.participant_id = profile.name;
    rec.group = profile.group;
    rec.rate_hz = rate_hz;
    const auto n_samples = static_cast<std::size_t>(std::llround(duration_ms * rate_hz / 1000.0));
    rec.samples.reserve(n_samples);
    const double max_x = std::nextafter(static_cast<double>(layout.canvas_width_px), 0.0);
    const double max_y = std::nextafter(static_cast<double>(layout.canvas_height_px), 0.0);
    std::size_t ep = 0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double t = static_cast<double>(k) * 1000.0 / rate_hz;
        while (ep + 1 < episodes.size() && t >= episodes[ep + 1].start_ms) ++ep;
        const auto& cur = episodes[ep];
        double x = cur.target_x;
        double y = cur.target_y;
        if (t >= cur.end_ms && ep + 1 < episodes.size()) {
            const auto& next = episodes[ep + 1];
            const double f = (t - cur.end_ms) / (next.start_ms - cur.end_ms);
            x += f * (next.target_x - cur.target_x);
            y += f * (next.target_y - cur.target_y);
        }
        x = std::clamp(x + rng.normal(0.0, profile.jitter_px), 0.0, max_x);
        y = std::clamp(y + rng.normal(0.0, profile.jitter_px), 0.0, max_y);
        rec.samples.push_back({static_cast<std::int64_t>(std::llround(t)), x, y, true});
    }
    return trial;
}

GazeRecording simulate_recording(const BiasProfile& profile, const SlideLayout& layout, double duration_ms,
                                 double rate_hz, std::uint64_t seed) {
    return simulate_trial(profile, layout, duration_ms, rate_hz, seed).recording;
}

std::vector<GazeRecording> simulate_cohort(const BiasProfile& profile, std::size_t n, std::uint64_t seed,
                                           const SlideLayout& layout, double duration_ms, double rate_hz) {
    if (n < 1) throw Error(ErrorCode::InvalidProfile, "cohort size must be at least 1");
    std::vector<GazeRecording> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto rec = simulate_recording(profile, layout, duration_ms, rate_hz, derive_seed(seed, i));
        rec.participant_id = fmt::format("{}-{:03d}", profile.name, i + 1);
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace gazescreen
