#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace gazescreen::cli {

/// Structured per-stage log: one JSON object per line with the stage name,
/// wall-clock duration and SHA-256 of every file the stage wrote.
class RunLog {
public:
    RunLog() = default;
    explicit RunLog(const std::filesystem::path& path);

    void begin(std::string stage);
    /// Closes the open stage. Paths are recorded relative to `root`.
    void end(const std::vector<std::filesystem::path>& outputs, const std::filesystem::path& root);

private:
    std::ofstream out_;
    std::string stage_;
    std::chrono::steady_clock::time_point started_;
};

}  // namespace gazescreen::cli
