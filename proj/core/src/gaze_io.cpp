#include "gazescreen/gaze_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gazescreen/error.hpp"

namespace gazescreen {

namespace {

constexpr std::string_view kHeader = "t_ms,x_px,y_px,valid";
constexpr std::array<std::string_view, 4> kColumns = {"t_ms", "x_px", "y_px", "valid"};

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc() && ptr == field.data() + field.size();
}

void append_double(std::string& out, double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), ptr);
}

}  // namespace

std::string_view group_name(GroupLabel g) noexcept {
    switch (g) {
        case GroupLabel::Anxious: return "anxious";
        case GroupLabel::Control: return "control";
        case GroupLabel::Depressive: return "depressive";
    }
    return "control";
}

std::string_view group_letter(GroupLabel g) noexcept {
    switch (g) {
        case GroupLabel::Anxious: return "A";
        case GroupLabel::Control: return "C";
        case GroupLabel::Depressive: return "D";
    }
    return "C";
}

std::optional<GroupLabel> parse_group(std::string_view name) noexcept {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c); });
    if (lower == "anxious" || lower == "a") return GroupLabel::Anxious;
    if (lower == "control" || lower == "c") return GroupLabel::Control;
    if (lower == "depressive" || lower == "d") return GroupLabel::Depressive;
    return std::nullopt;
}

GroupLabel group_from_index(int index) {
    if (index < 0 || index >= kGroupCount) {
        throw Error(ErrorCode::InvalidParameter, "group index out of range: " + std::to_string(index));
    }
    return static_cast<GroupLabel>(index);
}

std::vector<GazeSample> parse_gaze_samples(std::string_view text) {
    std::vector<GazeSample> samples;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    std::array<int, 4> column_of{-1, -1, -1, -1};
    std::size_t n_columns = 0;
    bool have_header = false;

    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;

        if (!have_header) {
            if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
            auto names = split_fields(line);
            n_columns = names.size();
            for (std::size_t i = 0; i < names.size(); ++i) {
                for (std::size_t c = 0; c < kColumns.size(); ++c) {
                    if (trim(names[i]) == kColumns[c]) column_of[c] = static_cast<int>(i);
                }
            }
            for (std::size_t c = 0; c < kColumns.size(); ++c) {
                if (column_of[c] < 0) {
                    throw Error(ErrorCode::MalformedHeader,
                                "missing column '" + std::string(kColumns[c]) + "' (expected " + std::string(kHeader) + ")");
                }
            }
            have_header = true;
            continue;
        }

        auto fields = split_fields(line);
        if (fields.size() != n_columns) {
            throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": expected " +
                                                     std::to_string(n_columns) + " fields");
        }
        GazeSample s;
        int valid_flag = -1;
        if (!parse_number(fields[column_of[0]], s.t_ms) || !parse_number(fields[column_of[1]], s.x_px) ||
            !parse_number(fields[column_of[2]], s.y_px) || !parse_number(fields[column_of[3]], valid_flag) ||
            (valid_flag != 0 && valid_flag != 1) || s.t_ms < 0) {
            throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": cannot parse '" +
                                                     std::string(line) + "'");
        }
        s.valid = valid_flag == 1;
        if (!samples.empty() && s.t_ms <= samples.back().t_ms) {
            throw Error(ErrorCode::NonMonotonicTimestamp,
                        "line " + std::to_string(line_no) + ": t_ms " + std::to_string(s.t_ms) +
                            " does not exceed previous " + std::to_string(samples.back().t_ms));
        }
        samples.push_back(s);
    }
    if (!have_header) throw Error(ErrorCode::MalformedHeader, "missing header line");
    if (samples.empty()) throw Error(ErrorCode::EmptyRecording, "no sample rows");
    return samples;
}

void apply_gaze_meta(GazeRecording& rec, std::string_view meta_json) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(meta_json);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidMetadata, e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::InvalidMetadata, "metadata must be a JSON object");
    if (!j.contains("participant_id") || !j["participant_id"].is_string()) {
        throw Error(ErrorCode::InvalidMetadata, "participant_id (string) is required");
    }
    if (!j.contains("group") || !j["group"].is_string()) {
        throw Error(ErrorCode::InvalidMetadata, "group (string) is required");
    }
    auto group = parse_group(j["group"].get<std::string>());
    if (!group) throw Error(ErrorCode::InvalidMetadata, "unknown group '" + j["group"].get<std::string>() + "'");
    rec.participant_id = j["participant_id"].get<std::string>();
    rec.group = *group;
    rec.rate_hz = j.value("rate_hz", 120.0);
    if (!(rec.rate_hz > 0.0)) throw Error(ErrorCode::InvalidMetadata, "rate_hz must be positive");
    auto opt_number = [&](const char* key) -> std::optional<double> {
        if (!j.contains(key) || j[key].is_null()) return std::nullopt;
        if (!j[key].is_number()) throw Error(ErrorCode::InvalidMetadata, std::string(key) + " must be a number");
        return j[key].get<double>();
    };
    rec.meta.cesd_score = opt_number("cesd_score");
    rec.meta.lsas_score = opt_number("lsas_score");
    rec.meta.age = opt_number("age");
    if (j.contains("sex") && j["sex"].is_string()) rec.meta.sex = j["sex"].get<std::string>();
}

GazeRecording parse_gaze_csv(std::string_view csv_text) {
    GazeRecording rec;
    rec.samples = parse_gaze_samples(csv_text);
    return rec;
}

GazeRecording parse_gaze_csv(std::string_view csv_text, std::string_view meta_json) {
    GazeRecording rec = parse_gaze_csv(csv_text);
    apply_gaze_meta(rec, meta_json);
    return rec;
}

std::string write_gaze_csv(const GazeRecording& rec) {
    std::string out(kHeader);
    out.push_back('\n');
    out.reserve(rec.samples.size() * 24);
    for (const auto& s : rec.samples) {
        out += std::to_string(s.t_ms);
        out.push_back(',');
        append_double(out, s.x_px);
        out.push_back(',');
        append_double(out, s.y_px);
        out.push_back(',');
        out.push_back(s.valid ? '1' : '0');
        out.push_back('\n');
    }
    return out;
}

std::string write_gaze_meta(const GazeRecording& rec) {
    nlohmann::ordered_json j;
    j["participant_id"] = rec.participant_id;
    j["group"] = std::string(group_name(rec.group));
    j["rate_hz"] = rec.rate_hz;
    if (rec.meta.cesd_score) j["cesd_score"] = *rec.meta.cesd_score;
    if (rec.meta.lsas_score) j["lsas_score"] = *rec.meta.lsas_score;
    if (rec.meta.age) j["age"] = *rec.meta.age;
    if (rec.meta.sex) j["sex"] = *rec.meta.sex;
    return j.dump() + "\n";
}

bool has_nominal_rate(const GazeRecording& rec) noexcept {
    if (rec.samples.size() < 2 || !(rec.rate_hz > 0.0)) return true;
    std::vector<std::int64_t> gaps;
    gaps.reserve(rec.samples.size() - 1);
    for (std::size_t i = 1; i < rec.samples.size(); ++i) gaps.push_back(rec.samples[i].t_ms - rec.samples[i - 1].t_ms);
    auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
    std::nth_element(gaps.begin(), mid, gaps.end());
    const double period = 1000.0 / rec.rate_hz;
    return std::abs(static_cast<double>(*mid) - period) <= 0.2 * period;
}

std::filesystem::path meta_path_for(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p.replace_extension(".meta.json");
    return p;
}

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidMetadata, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

GazeRecording read_recording(const std::filesystem::path& csv_path) {
    return parse_gaze_csv(slurp(csv_path), slurp(meta_path_for(csv_path)));
}

std::filesystem::path write_recording(const GazeRecording& rec, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto csv = dir / (rec.participant_id + ".csv");
    std::ofstream(csv, std::ios::binary) << write_gaze_csv(rec);
    std::ofstream(meta_path_for(csv), std::ios::binary) << write_gaze_meta(rec);
    return csv;
}

}  // namespace gazescreen
