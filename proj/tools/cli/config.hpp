#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gazescreen/dataset.hpp"
#include "gazescreen/events.hpp"
#include "gazescreen/geometry.hpp"
#include "gazescreen/model.hpp"
#include "gazescreen/render.hpp"
#include "gazescreen/simulate.hpp"

namespace gazescreen::cli {

struct SimulateBlock {
    /// Preset names or paths to profile JSON files.
    std::vector<std::string> profiles = {"control", "depressive"};
    std::size_t n = 40;
    double duration_ms = 10000.0;
    double rate_hz = 120.0;
    std::optional<std::uint64_t> layout_seed;
};

struct DatasetBlock {
    double fraction = 0.8;
    SplitUnit unit = SplitUnit::Participant;
    DatasetTag tag = DatasetTag::Synthetic;
    /// Fixed split seed; derived from the run seed when absent.
    std::optional<std::uint64_t> seed;
};

struct EvalBlock {
    int repeats = 1;
    bool heatmap = true;
};

struct PathsBlock {
    /// Directory of gaze CSVs to ingest; simulate when absent.
    std::optional<std::filesystem::path> in;
    std::filesystem::path out = "out";
};

struct PipelineConfig {
    ViewingGeometry geometry;
    DetectionParams detection;
    RenderConfig render;
    bool augment = false;
    SimulateBlock simulate;
    DatasetBlock dataset;
    ModelConfig model;
    std::optional<std::filesystem::path> backbone;
    TrainConfig train;
    EvalBlock eval;
    PathsBlock paths;
};

/// Parses and fully validates a pipeline config. Unknown keys are errors.
/// Relative paths resolve against `base_dir`.
PipelineConfig parse_pipeline_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Every block checked against its owning module's invariants.
void validate(const PipelineConfig& cfg);

void validate_train(const TrainConfig& cfg);

/// Resolves a preset name or a profile JSON path.
BiasProfile resolve_profile(const std::string& name_or_path);

/// Comma-separated group names or letters, e.g. "C,D" or "control,depressive".
std::vector<GroupLabel> parse_class_list(std::string_view text);

}  // namespace gazescreen::cli
