// `.rcm` layout: 4-byte magic "RCM\x01", little-endian u32 format version,
// little-endian u64 header length, UTF-8 JSON header, then the tensor blob.
// The header lists every tensor as {name, shape, dtype, offset, nbytes};
// offsets are relative to the blob start and data is little-endian.

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

#include <nlohmann/json.hpp>

#include "gazescreen/error.hpp"
#include "gazescreen/model.hpp"
#include "model_access.hpp"

namespace gazescreen {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'R', 'C', 'M', 0x01};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i)));
}

template <typename T>
T get_le(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return static_cast<T>(v);
}

struct StoredTensor {
    std::vector<int> shape;
    std::vector<double> values;
};

struct ParsedFile {
    nlohmann::json header;
    std::map<std::string, StoredTensor> tensors;
};

std::size_t element_count(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    return n;
}

ParsedFile parse_file(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 16 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
        throw Error(ErrorCode::CorruptFile, "bad magic bytes");
    }
    const auto version = get_le<std::uint32_t>(bytes.data() + 4);
    if (version != kFormatVersion) {
        throw Error(ErrorCode::VersionMismatch, "file format version " + std::to_string(version) + ", expected " +
                                                    std::to_string(kFormatVersion));
    }
    const auto header_len = get_le<std::uint64_t>(bytes.data() + 8);
    if (header_len > bytes.size() - 16) throw Error(ErrorCode::CorruptFile, "header length exceeds file size");
    ParsedFile out;
    try {
        out.header = nlohmann::json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(header_len));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::CorruptFile, std::string("header: ") + e.what());
    }
    const std::uint8_t* blob = bytes.data() + 16 + header_len;
    const std::size_t blob_size = bytes.size() - 16 - header_len;
    try {
        for (const auto& t : out.header.at("tensors")) {
            const auto name = t.at("name").get<std::string>();
            StoredTensor st;
            st.shape = t.at("shape").get<std::vector<int>>();
            const auto dtype = t.at("dtype").get<std::string>();
            const auto offset = t.at("offset").get<std::size_t>();
            const auto nbytes = t.at("nbytes").get<std::size_t>();
            const std::size_t width = dtype == "f64" ? 8 : dtype == "f32" ? 4 : 0;
            if (width == 0) throw Error(ErrorCode::CorruptFile, name + ": unsupported dtype " + dtype);
            const std::size_t count = element_count(st.shape);
            if (nbytes != count * width) {
                throw Error(ErrorCode::ShapeMismatch, name + ": " + std::to_string(nbytes) + " bytes stored for " +
                                                          std::to_string(count) + " elements");
            }
            if (offset > blob_size || nbytes > blob_size - offset) {
                throw Error(ErrorCode::CorruptFile, name + ": data extends past end of file");
            }
            st.values.resize(count);
            const std::uint8_t* p = blob + offset;
            for (std::size_t i = 0; i < count; ++i) {
                if (width == 8) {
                    st.values[i] = std::bit_cast<double>(get_le<std::uint64_t>(p + 8 * i));
                } else {
                    st.values[i] = std::bit_cast<float>(get_le<std::uint32_t>(p + 4 * i));
                }
            }
            out.tensors.emplace(name, std::move(st));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::CorruptFile, std::string("tensor table: ") + e.what());
    }
    return out;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::CorruptFile, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::ordered_json config_to_json(const ModelConfig& cfg) {
    nlohmann::ordered_json j;
    j["depth"] = cfg.depth;
    std::vector<std::string> classes;
    for (auto g : cfg.classes) classes.emplace_back(group_name(g));
    j["classes"] = classes;
    j["input_size"] = cfg.input_size;
    j["width_multiplier"] = cfg.width_multiplier;
    j["background"] = {cfg.background[0], cfg.background[1], cfg.background[2], cfg.background[3]};
    return j;
}

ModelConfig config_from_json(const nlohmann::json& j) {
    ModelConfig cfg;
    cfg.depth = j.at("depth").get<int>();
    cfg.classes.clear();
    for (const auto& name : j.at("classes")) {
        auto g = parse_group(name.get<std::string>());
        if (!g) throw Error(ErrorCode::CorruptFile, "unknown class in model config");
        cfg.classes.push_back(*g);
    }
    cfg.input_size = j.at("input_size").get<int>();
    cfg.width_multiplier = j.at("width_multiplier").get<double>();
    if (j.contains("background")) {
        auto bg = j["background"].get<std::vector<int>>();
        if (bg.size() == 4) {
            for (std::size_t i = 0; i < 4; ++i) cfg.background[i] = static_cast<std::uint8_t>(bg[i]);
        }
    }
    return cfg;
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const ResidualClassifier& model) {
    nlohmann::ordered_json header;
    header["format"] = "rcm";
    header["version"] = kFormatVersion;
    header["config"] = config_to_json(model.config());
    header["backbone_frozen"] = model.backbone_frozen();
    std::vector<std::uint8_t> blob;
    nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
    for (const auto* p : ModelAccess::params(model)) {
        nlohmann::ordered_json t;
        t["name"] = p->name;
        t["shape"] = p->shape;
        t["dtype"] = "f64";
        t["offset"] = blob.size();
        t["nbytes"] = p->value.size() * 8;
        tensors.push_back(std::move(t));
        for (double v : p->value) put_le(blob, std::bit_cast<std::uint64_t>(v));
    }
    header["tensors"] = tensors;
    const std::string text = header.dump();

    std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
    put_le(out, kFormatVersion);
    put_le(out, static_cast<std::uint64_t>(text.size()));
    out.insert(out.end(), text.begin(), text.end());
    out.insert(out.end(), blob.begin(), blob.end());
    return out;
}

ResidualClassifier deserialize_model(const std::vector<std::uint8_t>& bytes) {
    ParsedFile file = parse_file(bytes);
    if (!file.header.contains("config")) throw Error(ErrorCode::CorruptFile, "model file lacks a config block");
    ModelConfig cfg;
    try {
        cfg = config_from_json(file.header["config"]);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::CorruptFile, std::string("config: ") + e.what());
    }
    ResidualClassifier model(cfg, 0);
    for (auto* p : ModelAccess::params(model)) {
        auto it = file.tensors.find(p->name);
        if (it == file.tensors.end()) throw Error(ErrorCode::MissingTensor, p->name);
        if (it->second.shape != p->shape) throw Error(ErrorCode::ShapeMismatch, p->name);
        p->value = it->second.values;
    }
    model.set_backbone_frozen(file.header.value("backbone_frozen", false));
    return model;
}

void save_model(const ResidualClassifier& model, const std::filesystem::path& path) {
    const auto bytes = serialize_model(model);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::CorruptFile, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ResidualClassifier load_model(const std::filesystem::path& path) { return deserialize_model(read_bytes(path)); }

void load_backbone(ResidualClassifier& model, const std::filesystem::path& weight_file) {
    ParsedFile file = parse_file(read_bytes(weight_file));
    auto& params = ModelAccess::params(model);
    // Validate everything before writing anything.
    for (const auto* p : params) {
        if (p->head) continue;
        auto it = file.tensors.find(p->name);
        if (it == file.tensors.end()) throw Error(ErrorCode::MissingTensor, p->name);
        if (it->second.shape != p->shape) throw Error(ErrorCode::ShapeMismatch, p->name);
    }
    for (auto* p : params) {
        if (!p->head) p->value = file.tensors.at(p->name).values;
    }
    model.set_backbone_frozen(true);
}

}  // namespace gazescreen
