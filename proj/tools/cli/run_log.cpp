#include "run_log.hpp"

#include <nlohmann/json.hpp>

#include "gazescreen/error.hpp"
#include "hash.hpp"

namespace gazescreen::cli {

RunLog::RunLog(const std::filesystem::path& path) : out_(path, std::ios::trunc) {
    if (!out_) throw Error(ErrorCode::ImageIo, "cannot write " + path.string());
}

void RunLog::begin(std::string stage) {
    stage_ = std::move(stage);
    started_ = std::chrono::steady_clock::now();
}

void RunLog::end(const std::vector<std::filesystem::path>& outputs, const std::filesystem::path& root) {
    if (!out_.is_open()) return;
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started_);
    nlohmann::ordered_json hashes = nlohmann::ordered_json::object();
    for (const auto& p : outputs) hashes[p.lexically_proximate(root).generic_string()] = sha256_file(p);
    nlohmann::ordered_json line = {{"stage", stage_}, {"duration_ms", elapsed.count()}, {"outputs", hashes}};
    out_ << line.dump() << '\n';
    out_.flush();
}

}  // namespace gazescreen::cli
