#include "gazescreen/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gazescreen/augment.hpp"
#include "gazescreen/error.hpp"
#include "gazescreen/rng.hpp"

namespace gazescreen {

std::string_view tag_name(DatasetTag t) noexcept {
    switch (t) {
        case DatasetTag::A1: return "A1";
        case DatasetTag::A2: return "A2";
        case DatasetTag::B: return "B";
        case DatasetTag::Synthetic: return "synthetic";
    }
    return "synthetic";
}

std::optional<DatasetTag> parse_tag(std::string_view s) noexcept {
    if (s == "A1") return DatasetTag::A1;
    if (s == "A2") return DatasetTag::A2;
    if (s == "B") return DatasetTag::B;
    if (s == "synthetic") return DatasetTag::Synthetic;
    return std::nullopt;
}

std::string_view unit_name(SplitUnit u) noexcept { return u == SplitUnit::Image ? "image" : "participant"; }

std::optional<SplitUnit> parse_unit(std::string_view s) noexcept {
    if (s == "image") return SplitUnit::Image;
    if (s == "participant") return SplitUnit::Participant;
    return std::nullopt;
}

DatasetManifest::DatasetManifest(std::vector<ManifestEntry> entries, DatasetTag tag)
    : entries_(std::move(entries)), tag_(tag) {
    for (const auto& e : entries_) ++counts_[static_cast<std::size_t>(group_index(e.group))];
}

std::vector<GroupLabel> DatasetManifest::classes() const {
    std::vector<GroupLabel> out;
    for (int i = 0; i < kGroupCount; ++i) {
        if (counts_[static_cast<std::size_t>(i)] > 0) out.push_back(group_from_index(i));
    }
    return out;
}

namespace {

std::vector<std::string> split_tokens(const std::string& stem) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = stem.find("__", start);
        out.push_back(stem.substr(start, pos == std::string::npos ? pos : pos - start));
        if (pos == std::string::npos) break;
        start = pos + 2;
    }
    return out;
}

std::optional<GroupLabel> group_from_participant(const std::string& participant_id) {
    return parse_group(participant_id.substr(0, participant_id.find('-')));
}

}  // namespace

DatasetManifest build_manifest(const std::filesystem::path& dir, DatasetTag tag) {
    std::vector<std::filesystem::path> pngs;
    if (std::filesystem::exists(dir)) {
        for (const auto& item : std::filesystem::recursive_directory_iterator(dir)) {
            if (item.is_regular_file() && item.path().extension() == ".png") pngs.push_back(item.path());
        }
    }
    std::sort(pngs.begin(), pngs.end());

    std::vector<ManifestEntry> entries;
    std::set<std::string> seen;
    for (const auto& path : pngs) {
        ManifestEntry e;
        e.image_id = path.stem().string();
        e.image_path = path.string();
        e.dataset_tag = tag;
        if (!seen.insert(e.image_id).second) throw Error(ErrorCode::DuplicateImageId, e.image_id);

        auto tokens = split_tokens(e.image_id);
        e.base_id = e.image_id;
        if (tokens.size() >= 2) {
            if (auto op = parse_augment_op(tokens.back())) {
                e.augment_op = tokens.back();
                e.base_id = e.image_id.substr(0, e.image_id.size() - tokens.back().size() - 2);
            }
        }

        auto sidecar = path;
        sidecar.replace_extension(".meta.json");
        std::optional<GroupLabel> group;
        if (std::filesystem::exists(sidecar)) {
            std::ifstream in(sidecar);
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& ex) {
                throw Error(ErrorCode::UnlabeledImage, path.string() + ": bad sidecar: " + ex.what());
            }
            e.participant_id = j.value("participant_id", tokens.front());
            if (j.contains("group") && j["group"].is_string()) group = parse_group(j["group"].get<std::string>());
        } else {
            e.participant_id = tokens.front();
            group = group_from_participant(e.participant_id);
        }
        if (!group) throw Error(ErrorCode::UnlabeledImage, path.string());
        e.group = *group;
        entries.push_back(std::move(e));
    }
    return DatasetManifest(std::move(entries), tag);
}

std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& m, double train_fraction, std::uint64_t seed,
                                                  SplitUnit unit) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidParameter, "train_fraction must lie in (0, 1)");
    }
    const auto unit_of = [unit](const ManifestEntry& e) -> const std::string& {
        return unit == SplitUnit::Participant ? e.participant_id : e.image_id;
    };

    Pcg64 rng(seed);
    std::set<std::string> train_units;
    for (GroupLabel g : m.classes()) {
        std::set<std::string> unique;
        for (const auto& e : m.entries()) {
            if (e.group == g) unique.insert(unit_of(e));
        }
        if (unique.size() < 2) {
            throw Error(ErrorCode::ClassTooSmall, std::string(group_name(g)) + " has " + std::to_string(unique.size()) +
                                                      " " + std::string(unit_name(unit)) + " unit(s)");
        }
        std::vector<std::string> units(unique.begin(), unique.end());
        rng.shuffle(units);
        const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * units.size() + 1e-9));
        train_units.insert(units.begin(), units.begin() + static_cast<std::ptrdiff_t>(n_train));
    }

    std::vector<ManifestEntry> train;
    std::vector<ManifestEntry> test;
    for (const auto& e : m.entries()) (train_units.count(unit_of(e)) ? train : test).push_back(e);

    SplitInfo info{seed, train_fraction, unit};
    DatasetManifest train_m(std::move(train), m.tag());
    DatasetManifest test_m(std::move(test), m.tag());
    train_m.set_split_info(info);
    test_m.set_split_info(info);
    return {std::move(train_m), std::move(test_m)};
}

DatasetManifest subset(const DatasetManifest& m, const std::vector<GroupLabel>& classes) {
    if (classes.empty()) throw Error(ErrorCode::EmptyResult, "no classes requested");
    std::vector<ManifestEntry> kept;
    for (const auto& e : m.entries()) {
        if (std::find(classes.begin(), classes.end(), e.group) != classes.end()) kept.push_back(e);
    }
    if (kept.empty()) throw Error(ErrorCode::EmptyResult, "no entries in the requested classes");
    DatasetManifest out(std::move(kept), m.tag());
    if (m.split_info()) out.set_split_info(*m.split_info());
    return out;
}

std::string manifest_to_json(const DatasetManifest& m) {
    nlohmann::ordered_json header;
    header["tag"] = std::string(tag_name(m.tag()));
    if (m.split_info()) {
        header["seed"] = m.split_info()->seed;
        header["fraction"] = m.split_info()->fraction;
        header["unit"] = std::string(unit_name(m.split_info()->unit));
    } else {
        header["seed"] = nullptr;
        header["fraction"] = nullptr;
        header["unit"] = nullptr;
    }
    nlohmann::ordered_json counts;
    for (int i = 0; i < kGroupCount; ++i) {
        counts[std::string(group_name(group_from_index(i)))] = m.class_counts()[static_cast<std::size_t>(i)];
    }
    header["class_counts"] = counts;

    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& e : m.entries()) {
        nlohmann::ordered_json j;
        j["image_id"] = e.image_id;
        j["image_path"] = e.image_path;
        j["participant_id"] = e.participant_id;
        j["group"] = std::string(group_name(e.group));
        j["base_id"] = e.base_id;
        j["augment_op"] = e.augment_op ? nlohmann::ordered_json(*e.augment_op) : nlohmann::ordered_json(nullptr);
        j["dataset_tag"] = std::string(tag_name(e.dataset_tag));
        entries.push_back(std::move(j));
    }
    nlohmann::ordered_json doc;
    doc["header"] = header;
    doc["entries"] = entries;
    return doc.dump(2) + "\n";
}

DatasetManifest manifest_from_json(std::string_view text) {
    try {
        auto doc = nlohmann::json::parse(text);
        const auto& header = doc.at("header");
        auto tag = parse_tag(header.at("tag").get<std::string>());
        if (!tag) throw Error(ErrorCode::InvalidConfig, "unknown dataset tag");
        std::vector<ManifestEntry> entries;
        for (const auto& j : doc.at("entries")) {
            ManifestEntry e;
            e.image_id = j.at("image_id").get<std::string>();
            e.image_path = j.at("image_path").get<std::string>();
            e.participant_id = j.at("participant_id").get<std::string>();
            auto g = parse_group(j.at("group").get<std::string>());
            if (!g) throw Error(ErrorCode::UnlabeledImage, e.image_id);
            e.group = *g;
            e.base_id = j.at("base_id").get<std::string>();
            if (j.contains("augment_op") && !j["augment_op"].is_null()) e.augment_op = j["augment_op"].get<std::string>();
            auto et = parse_tag(j.value("dataset_tag", std::string(tag_name(*tag))));
            e.dataset_tag = et.value_or(*tag);
            entries.push_back(std::move(e));
        }
        DatasetManifest m(std::move(entries), *tag);
        if (header.contains("seed") && !header["seed"].is_null()) {
            auto unit = parse_unit(header.at("unit").get<std::string>());
            if (!unit) throw Error(ErrorCode::InvalidConfig, "unknown split unit");
            m.set_split_info({header["seed"].get<std::uint64_t>(), header.at("fraction").get<double>(), *unit});
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("manifest: ") + e.what());
    }
}

// On disk, image paths are relative to the manifest's directory so a run
// directory can move without invalidating its manifests.
void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    const fs::path base = fs::absolute(path).parent_path();
    fs::create_directories(base);
    std::vector<ManifestEntry> entries = m.entries();
    for (auto& e : entries) {
        fs::path p(e.image_path);
        if (!p.empty()) e.image_path = fs::absolute(p).lexically_normal().lexically_proximate(base).generic_string();
    }
    DatasetManifest rel(std::move(entries), m.tag());
    if (m.split_info()) rel.set_split_info(*m.split_info());
    std::ofstream(path, std::ios::binary) << manifest_to_json(rel);
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open manifest " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    DatasetManifest loaded = manifest_from_json(ss.str());
    const auto base = std::filesystem::absolute(path).parent_path();
    std::vector<ManifestEntry> entries = loaded.entries();
    for (auto& e : entries) {
        std::filesystem::path p(e.image_path);
        if (p.is_relative()) e.image_path = (base / p).lexically_normal().string();
    }
    DatasetManifest out(std::move(entries), loaded.tag());
    if (loaded.split_info()) out.set_split_info(*loaded.split_info());
    return out;
}

}  // namespace gazescreen
