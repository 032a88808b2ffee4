#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <vector>

#include "config.hpp"
#include "gazescreen/eval.hpp"

namespace gazescreen::cli {

struct PipelineResult {
    std::vector<double> accuracies;  // one per split repeat
    double mean_accuracy = 0.0;
    ConfusionMatrix pooled;          // summed over repeats
    Report report;
};

/// Simulate or ingest, detect, render, optionally augment, build the manifest,
/// then split, train and evaluate `eval.repeats` times with seeds derived from
/// `seed`. Writes everything under `cfg.paths.out`, including run.jsonl.
/// `progress` receives one line per stage when non-null.
PipelineResult run_pipeline(const PipelineConfig& cfg, std::uint64_t seed, std::ostream* progress = nullptr);

}  // namespace gazescreen::cli
