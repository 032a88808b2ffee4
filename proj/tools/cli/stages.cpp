#include "stages.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gazescreen/augment.hpp"
#include "gazescreen/error.hpp"

namespace gazescreen::cli {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

fs::path sidecar_for(const fs::path& png) {
    auto p = png;
    p.replace_extension(".meta.json");
    return p;
}

}  // namespace

std::vector<fs::path> list_files(const fs::path& dir, std::string_view suffix) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::ImageIo, "not a directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && ends_with(entry.path().filename().string(), suffix)) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<fs::path> list_gaze_files(const fs::path& dir) {
    auto files = list_files(dir, ".csv");
    std::erase_if(files, [](const fs::path& p) {
        const auto name = p.filename().string();
        return ends_with(name, ".fixations.csv") || ends_with(name, ".saccades.csv");
    });
    return files;
}

void write_text(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ImageIo, "cannot write " + path.string());
    out << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ImageIo, "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<fs::path> write_recording_files(const GazeRecording& rec, const fs::path& dir) {
    const auto csv = write_recording(rec, dir);
    return {csv, meta_path_for(csv)};
}

std::vector<fs::path> export_events(const GazeRecording& rec, const DetectionParams& params,
                                    const ViewingGeometry& geom, const fs::path& dir) {
    const auto sp = build_scanpath(rec, params, geom);
    const auto fix = dir / (rec.participant_id + ".fixations.csv");
    const auto sac = dir / (rec.participant_id + ".saccades.csv");
    write_text(fix, write_fixations_csv(sp.fixations));
    write_text(sac, write_saccades_csv(sp.saccades));
    return {fix, sac};
}

void write_image_sidecar(const fs::path& png, const std::string& participant_id, GroupLabel group,
                         const std::optional<std::string>& augment_op) {
    nlohmann::json j = {{"participant_id", participant_id}, {"group", std::string(group_name(group))}};
    if (augment_op) j["augment_op"] = *augment_op;
    write_text(sidecar_for(png), j.dump(2) + "\n");
}

std::vector<fs::path> render_recording(const GazeRecording& rec, const DetectionParams& params,
                                       const ViewingGeometry& geom, const RenderConfig& cfg, const fs::path& dir) {
    const auto sp = build_scanpath(rec, params, geom);
    const auto png = dir / render_filename(rec.participant_id, cfg.style);
    write_png(render_scanpath(sp, cfg), png);
    write_image_sidecar(png, rec.participant_id, rec.group);
    return {png, sidecar_for(png)};
}

std::vector<fs::path> augment_image(const fs::path& png, const fs::path& dir, bool include_source) {
    const auto img = read_png(png);
    const auto stem = png.stem().string();

    std::string participant = stem.substr(0, stem.find("__"));
    std::optional<GroupLabel> group;
    if (const auto side = sidecar_for(png); fs::exists(side)) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_text(side));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::UnlabeledImage, side.string() + ": " + e.what());
        }
        participant = j.value("participant_id", participant);
        if (j.contains("group") && j["group"].is_string()) group = parse_group(j["group"].get<std::string>());
    } else {
        group = parse_group(participant.substr(0, participant.find('-')));
    }
    if (!group) throw Error(ErrorCode::UnlabeledImage, png.string());

    std::vector<fs::path> out;
    if (include_source) {
        const auto copy = dir / png.filename();
        write_png(img, copy);
        write_image_sidecar(copy, participant, *group);
        out.push_back(copy);
        out.push_back(sidecar_for(copy));
    }
    for (const auto& op : augmentation_bank()) {
        const auto target = dir / (stem + "__" + op.name() + ".png");
        write_png(apply(op, img), target);
        write_image_sidecar(target, participant, *group, op.name());
        out.push_back(target);
        out.push_back(sidecar_for(target));
    }
    return out;
}

}  // namespace gazescreen::cli
