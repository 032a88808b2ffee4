#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gazescreen/gaze_io.hpp"

namespace gazescreen {

enum class DatasetTag { A1, A2, B, Synthetic };
enum class SplitUnit { Image, Participant };

std::string_view tag_name(DatasetTag t) noexcept;
std::optional<DatasetTag> parse_tag(std::string_view s) noexcept;
std::string_view unit_name(SplitUnit u) noexcept;
std::optional<SplitUnit> parse_unit(std::string_view s) noexcept;

struct ManifestEntry {
    std::string image_id;  // file stem
    std::string image_path;
    std::string participant_id;
    GroupLabel group = GroupLabel::Control;
    std::string base_id;
    std::optional<std::string> augment_op;
    DatasetTag dataset_tag = DatasetTag::Synthetic;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// How a manifest was produced by `split`; absent for unsplit manifests.
struct SplitInfo {
    std::uint64_t seed = 0;
    double fraction = 0.8;
    SplitUnit unit = SplitUnit::Participant;

    friend bool operator==(const SplitInfo&, const SplitInfo&) = default;
};

class DatasetManifest {
public:
    DatasetManifest() = default;
    explicit DatasetManifest(std::vector<ManifestEntry> entries, DatasetTag tag = DatasetTag::Synthetic);

    const std::vector<ManifestEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    /// Indexed by GroupLabel.
    const std::array<std::size_t, kGroupCount>& class_counts() const noexcept { return counts_; }
    std::size_t count(GroupLabel g) const noexcept { return counts_[static_cast<std::size_t>(group_index(g))]; }

    /// Classes with at least one entry, canonical order.
    std::vector<GroupLabel> classes() const;

    DatasetTag tag() const noexcept { return tag_; }
    const std::optional<SplitInfo>& split_info() const noexcept { return split_; }
    void set_split_info(SplitInfo info) { split_ = info; }

    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;

private:
    std::vector<ManifestEntry> entries_;
    std::array<std::size_t, kGroupCount> counts_{};
    DatasetTag tag_ = DatasetTag::Synthetic;
    std::optional<SplitInfo> split_;
};

/// One entry per PNG under `dir` (recursive, path order). Labels come from a
/// `<stem>.meta.json` sidecar when present, otherwise from the file name:
/// `<participant_id>__<style>[__<augment op>].png`, with the group taken from
/// the participant-id prefix before the first '-'.
DatasetManifest build_manifest(const std::filesystem::path& dir, DatasetTag tag);

/// Stratified, seeded split: each class contributes floor(fraction · units)
/// units to train. Participant units keep every image of a participant in one fold.
std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& m, double train_fraction, std::uint64_t seed,
                                                  SplitUnit unit);

DatasetManifest subset(const DatasetManifest& m, const std::vector<GroupLabel>& classes);

std::string manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(std::string_view text);
void save_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace gazescreen
