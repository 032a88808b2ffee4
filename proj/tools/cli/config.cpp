#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gazescreen/error.hpp"

namespace gazescreen::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

void allow_keys(const json& block, const std::string& where, std::initializer_list<const char*> keys) {
    if (!block.is_object()) bad(where + " must be an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, value] : block.items()) {
        if (!allowed.count(key)) bad("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read(const json& block, const char* key, T& out) {
    if (!block.contains(key)) return;
    try {
        out = block.at(key).get<T>();
    } catch (const json::exception&) {
        bad(std::string("wrong type for '") + key + "'");
    }
}

Rgba read_colour(const json& j, const char* key) {
    if (j.is_string()) {
        if (j.get<std::string>() == "transparent") return {0, 0, 0, 0};
        bad(std::string(key) + ": expected \"transparent\" or an [r, g, b(, a)] array");
    }
    if (!j.is_array() || (j.size() != 3 && j.size() != 4)) bad(std::string(key) + ": expected [r, g, b(, a)]");
    Rgba c{0, 0, 0, 255};
    for (std::size_t i = 0; i < j.size(); ++i) {
        const int v = j[i].get<int>();
        if (v < 0 || v > 255) bad(std::string(key) + ": channel out of range");
        c[i] = static_cast<std::uint8_t>(v);
    }
    return c;
}

std::vector<GroupLabel> read_classes(const json& j) {
    if (!j.is_array()) bad("model.classes must be an array");
    std::vector<GroupLabel> out;
    for (const auto& v : j) {
        auto g = parse_group(v.get<std::string>());
        if (!g) bad("unknown class '" + v.get<std::string>() + "'");
        out.push_back(*g);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
    return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

std::vector<GroupLabel> parse_class_list(std::string_view text) {
    std::vector<GroupLabel> out;
    std::stringstream ss{std::string(text)};
    std::string token;
    while (std::getline(ss, token, ',')) {
        token.erase(0, token.find_first_not_of(' '));
        token.erase(token.find_last_not_of(' ') + 1);
        auto g = parse_group(token);
        if (!g) bad("unknown class '" + token + "'");
        out.push_back(*g);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

BiasProfile resolve_profile(const std::string& name_or_path) {
    const auto presets = preset_profiles();
    if (auto it = presets.find(name_or_path); it != presets.end()) return it->second;
    std::ifstream in(name_or_path);
    if (!in) throw Error(ErrorCode::InvalidProfile, "no preset or file named '" + name_or_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return profile_from_json(ss.str());
}

PipelineConfig parse_pipeline_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        bad(std::string("config is not valid JSON: ") + e.what());
    }
    allow_keys(root, "config",
               {"geometry", "detection", "render", "augment", "simulate", "dataset", "model", "train", "eval", "paths"});

    PipelineConfig cfg;
    try {
        if (root.contains("geometry")) {
            const auto& g = root["geometry"];
            allow_keys(g, "geometry", {"screen_px", "screen_mm", "distance_mm"});
            if (g.contains("screen_px")) {
                const auto px = g["screen_px"].get<std::array<int, 2>>();
                cfg.geometry.screen_width_px = px[0];
                cfg.geometry.screen_height_px = px[1];
            }
            if (g.contains("screen_mm")) {
                const auto mm = g["screen_mm"].get<std::array<double, 2>>();
                cfg.geometry.screen_width_mm = mm[0];
                cfg.geometry.screen_height_mm = mm[1];
            }
            read(g, "distance_mm", cfg.geometry.viewing_distance_mm);
        }
        cfg.render.source_width_px = cfg.geometry.screen_width_px;
        cfg.render.source_height_px = cfg.geometry.screen_height_px;

        if (root.contains("detection")) {
            const auto& d = root["detection"];
            allow_keys(d, "detection",
                       {"dispersion_threshold_deg", "min_duration_ms", "fixation_duration_min_ms",
                        "fixation_duration_max_ms", "max_saccade_amplitude_deg", "max_gap_ms", "overlong"});
            read(d, "dispersion_threshold_deg", cfg.detection.dispersion_threshold_deg);
            read(d, "min_duration_ms", cfg.detection.min_duration_ms);
            read(d, "fixation_duration_min_ms", cfg.detection.fixation_duration_min_ms);
            read(d, "fixation_duration_max_ms", cfg.detection.fixation_duration_max_ms);
            read(d, "max_saccade_amplitude_deg", cfg.detection.max_saccade_amplitude_deg);
            read(d, "max_gap_ms", cfg.detection.max_gap_ms);
            if (d.contains("overlong")) {
                const auto v = d["overlong"].get<std::string>();
                if (v == "drop") cfg.detection.overlong = OverlongPolicy::Drop;
                else if (v == "truncate") cfg.detection.overlong = OverlongPolicy::Truncate;
                else bad("detection.overlong must be \"drop\" or \"truncate\"");
            }
        }

        if (root.contains("render")) {
            const auto& r = root["render"];
            allow_keys(r, "render",
                       {"style", "output_size", "background", "stroke_rgba", "stroke_width_px", "radius_min_px",
                        "radius_per_ms", "circle_alpha"});
            if (r.contains("style")) {
                auto s = parse_style(r["style"].get<std::string>());
                if (!s) bad("render.style must be \"overlay\" or \"polyline\"");
                cfg.render.style = *s;
            }
            read(r, "output_size", cfg.render.output_size);
            if (r.contains("background")) cfg.render.background = read_colour(r["background"], "render.background");
            if (r.contains("stroke_rgba")) cfg.render.stroke_rgba = read_colour(r["stroke_rgba"], "render.stroke_rgba");
            read(r, "stroke_width_px", cfg.render.stroke_width_px);
            read(r, "radius_min_px", cfg.render.radius_min_px);
            read(r, "radius_per_ms", cfg.render.radius_per_ms);
            if (r.contains("circle_alpha")) {
                const int a = r["circle_alpha"].get<int>();
                if (a < 0 || a > 255) bad("render.circle_alpha must be in [0, 255]");
                cfg.render.circle_alpha = static_cast<std::uint8_t>(a);
            }
        }

        if (root.contains("augment")) {
            const auto& a = root["augment"];
            if (a.is_boolean()) {
                cfg.augment = a.get<bool>();
            } else {
                allow_keys(a, "augment", {"enabled"});
                read(a, "enabled", cfg.augment);
            }
        }

        if (root.contains("simulate")) {
            const auto& s = root["simulate"];
            allow_keys(s, "simulate", {"profiles", "n", "duration_ms", "rate_hz", "layout_seed"});
            if (s.contains("profiles")) {
                cfg.simulate.profiles.clear();
                for (const auto& p : s["profiles"]) {
                    auto name = p.get<std::string>();
                    const auto presets = preset_profiles();
                    if (!presets.count(name)) name = resolve(name, base_dir).string();
                    cfg.simulate.profiles.push_back(name);
                }
            }
            read(s, "n", cfg.simulate.n);
            read(s, "duration_ms", cfg.simulate.duration_ms);
            read(s, "rate_hz", cfg.simulate.rate_hz);
            if (s.contains("layout_seed")) cfg.simulate.layout_seed = s["layout_seed"].get<std::uint64_t>();
        }

        if (root.contains("dataset")) {
            const auto& d = root["dataset"];
            allow_keys(d, "dataset", {"fraction", "unit", "tag", "seed"});
            if (d.contains("seed")) cfg.dataset.seed = d["seed"].get<std::uint64_t>();
            read(d, "fraction", cfg.dataset.fraction);
            if (d.contains("unit")) {
                auto u = parse_unit(d["unit"].get<std::string>());
                if (!u) bad("dataset.unit must be \"image\" or \"participant\"");
                cfg.dataset.unit = *u;
            }
            if (d.contains("tag")) {
                auto t = parse_tag(d["tag"].get<std::string>());
                if (!t) bad("dataset.tag must be one of A1, A2, B, synthetic");
                cfg.dataset.tag = *t;
            }
        }

        bool explicit_classes = false;
        if (root.contains("model")) {
            const auto& m = root["model"];
            allow_keys(m, "model", {"depth", "input_size", "width_multiplier", "classes", "background", "backbone"});
            read(m, "depth", cfg.model.depth);
            read(m, "input_size", cfg.model.input_size);
            read(m, "width_multiplier", cfg.model.width_multiplier);
            if (m.contains("classes")) {
                cfg.model.classes = read_classes(m["classes"]);
                explicit_classes = true;
            }
            if (m.contains("background")) cfg.model.background = read_colour(m["background"], "model.background");
            if (m.contains("backbone")) cfg.backbone = resolve(m["backbone"].get<std::string>(), base_dir);
        }

        if (root.contains("train")) {
            const auto& t = root["train"];
            allow_keys(t, "train",
                       {"epochs", "batch_size", "learning_rate", "momentum", "weight_decay", "head_only_epochs",
                        "transforms"});
            read(t, "epochs", cfg.train.epochs);
            read(t, "batch_size", cfg.train.batch_size);
            read(t, "learning_rate", cfg.train.learning_rate);
            read(t, "momentum", cfg.train.momentum);
            read(t, "weight_decay", cfg.train.weight_decay);
            read(t, "head_only_epochs", cfg.train.head_only_epochs);
            if (t.contains("transforms")) {
                const auto v = t["transforms"].get<std::string>();
                if (v == "none") cfg.train.transforms = TrainTransforms::None;
                else if (v == "light") cfg.train.transforms = TrainTransforms::Light;
                else bad("train.transforms must be \"none\" or \"light\"");
            }
        }

        if (root.contains("eval")) {
            const auto& e = root["eval"];
            allow_keys(e, "eval", {"repeats", "heatmap"});
            read(e, "repeats", cfg.eval.repeats);
            read(e, "heatmap", cfg.eval.heatmap);
        }

        if (root.contains("paths")) {
            const auto& p = root["paths"];
            allow_keys(p, "paths", {"in", "out"});
            if (p.contains("in") && !p["in"].is_null()) cfg.paths.in = resolve(p["in"].get<std::string>(), base_dir);
            if (p.contains("out")) cfg.paths.out = resolve(p["out"].get<std::string>(), base_dir);
        }

        // Without explicit classes the model covers the simulated groups.
        if (!explicit_classes && !cfg.paths.in) {
            std::vector<GroupLabel> groups;
            for (const auto& p : cfg.simulate.profiles) groups.push_back(resolve_profile(p).group);
            std::sort(groups.begin(), groups.end());
            groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
            cfg.model.classes = groups;
        }
    } catch (const nlohmann::json::exception& e) {
        bad(std::string("config: ") + e.what());
    }

    validate(cfg);
    return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) bad("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_pipeline_config(ss.str(), path.parent_path());
}

void validate_train(const TrainConfig& t) {
    if (t.epochs < 1 || t.batch_size < 1 || !(t.learning_rate >= 0.0) || !(t.momentum >= 0.0) ||
        !(t.weight_decay >= 0.0) || t.head_only_epochs < 0) {
        bad("train: epochs and batch_size must be >= 1; rates must be non-negative");
    }
}

void validate(const PipelineConfig& cfg) {
    gazescreen::validate(cfg.geometry);
    gazescreen::validate(cfg.detection);
    gazescreen::validate(cfg.render);
    gazescreen::validate(cfg.model);
    (void)stage_plan(cfg.model.depth);
    validate_train(cfg.train);
    if (!(cfg.dataset.fraction > 0.0 && cfg.dataset.fraction < 1.0)) bad("dataset.fraction must lie in (0, 1)");
    if (cfg.eval.repeats < 1) bad("eval.repeats must be at least 1");
    if (!cfg.paths.in) {
        if (cfg.simulate.profiles.empty()) bad("simulate.profiles is empty");
        if (cfg.simulate.n < 1) bad("simulate.n must be at least 1");
        if (!(cfg.simulate.duration_ms > 0.0) || !(cfg.simulate.rate_hz > 0.0)) {
            bad("simulate.duration_ms and simulate.rate_hz must be positive");
        }
        std::set<GroupLabel> groups;
        for (const auto& p : cfg.simulate.profiles) {
            const auto profile = resolve_profile(p);
            if (std::find(cfg.model.classes.begin(), cfg.model.classes.end(), profile.group) ==
                cfg.model.classes.end()) {
                bad("profile '" + profile.name + "' has group " + std::string(group_name(profile.group)) +
                    ", which is not among model.classes");
            }
            groups.insert(profile.group);
        }
        if (groups.size() != cfg.model.classes.size()) bad("every model class needs a simulated profile");
    }
    if (cfg.backbone && !std::filesystem::exists(*cfg.backbone)) bad("backbone file not found: " + cfg.backbone->string());
}

}  // namespace gazescreen::cli
