#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gazescreen/dataset.hpp"
#include "gazescreen/gaze_io.hpp"
#include "gazescreen/image.hpp"
#include "gazescreen/tensor.hpp"

namespace gazescreen {

enum class BlockKind { Basic, Bottleneck };

struct StagePlan {
    BlockKind kind = BlockKind::Basic;
    std::array<int, 4> blocks{};

    friend bool operator==(const StagePlan&, const StagePlan&) = default;
};

/// ResNet stage plans; depth 8 is a desk-scale variant with one basic block per stage.
StagePlan stage_plan(int depth);

struct ModelConfig {
    int depth = 18;
    /// Output classes in canonical order; the head has one logit per entry.
    std::vector<GroupLabel> classes = {GroupLabel::Control, GroupLabel::Depressive};
    int input_size = 224;
    double width_multiplier = 1.0;
    /// Transparent pixels are composited onto this colour before the RGB network.
    Rgba background = {0, 0, 0, 255};

    int n_classes() const noexcept { return static_cast<int>(classes.size()); }

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

void validate(const ModelConfig& cfg);

/// Batch-norm behaviour for a forward pass.
enum class BnMode {
    BatchStats,    // training: normalize with batch statistics, update running stats
    RunningStats,  // inference: normalize with the stored running statistics
};

struct ParameterInfo {
    std::string name;
    std::vector<int> shape;
    bool trainable = true;  // false for batch-norm running statistics
    bool head = false;
};

enum class HeadInit { Uniform, Zero };

enum class TrainTransforms { None, Light };

struct TrainConfig {
    int epochs = 30;
    int batch_size = 16;
    double learning_rate = 0.01;
    double momentum = 0.9;
    double weight_decay = 1e-4;
    int head_only_epochs = 3;
    std::uint64_t seed = 0;
    TrainTransforms transforms = TrainTransforms::None;
};

struct EpochStats {
    int epoch = 0;
    int phase = 2;  // 1 = head only, 2 = all parameters
    double mean_loss = 0.0;
    double accuracy = 0.0;

    friend bool operator==(const EpochStats&, const EpochStats&) = default;
};

struct History {
    std::vector<EpochStats> epochs;

    friend bool operator==(const History&, const History&) = default;
};

class ResidualClassifier {
public:
    ResidualClassifier(const ModelConfig& cfg, std::uint64_t seed, HeadInit head_init = HeadInit::Uniform);
    ~ResidualClassifier();
    ResidualClassifier(ResidualClassifier&&) noexcept;
    ResidualClassifier& operator=(ResidualClassifier&&) noexcept;
    ResidualClassifier(const ResidualClassifier&) = delete;
    ResidualClassifier& operator=(const ResidualClassifier&) = delete;

    const ModelConfig& config() const noexcept;
    const StagePlan& plan() const noexcept;

    std::vector<ParameterInfo> parameters() const;
    std::size_t parameter_count() const;
    const std::vector<double>& value(const std::string& name) const;
    std::vector<double>& mutable_value(const std::string& name);
    const std::vector<double>& gradient(const std::string& name) const;

    /// RGBA image → normalized 1×3×S×S tensor (letterboxed, composited, ImageNet mean/std).
    Tensor prepare_input(const RasterImage& img) const;

    /// Logits for a batch; RunningStats passes are pure.
    std::vector<std::vector<double>> logits(const Tensor& batch) const;
    /// Globally pooled penultimate features for a batch (RunningStats).
    std::vector<std::vector<double>> features(const Tensor& batch) const;

    /// Mean cross-entropy over the batch; accumulates fresh gradients into every
    /// parameter (or only the head when `head_only`). `predictions` receives argmaxes.
    double loss_and_gradients(const Tensor& batch, const std::vector<int>& labels, BnMode mode, bool head_only = false,
                              std::vector<int>* predictions = nullptr);

    /// Mean cross-entropy without touching gradients or running statistics.
    double loss(const Tensor& batch, const std::vector<int>& labels) const;

    /// Softmax over classes for one image.
    std::vector<double> predict(const RasterImage& img) const;
    /// Argmax class index (ties resolve to the lowest index).
    int predict_index(const RasterImage& img) const;

    bool backbone_frozen() const noexcept;
    void set_backbone_frozen(bool frozen) noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;

    friend class ModelAccess;
};

ResidualClassifier build_model(const ModelConfig& cfg, std::uint64_t seed, HeadInit head_init = HeadInit::Uniform);

/// Copies every non-head tensor (convolutions and batch-norm state) from an
/// interchange file and marks the backbone frozen for head-only warm-up.
void load_backbone(ResidualClassifier& model, const std::filesystem::path& weight_file);

/// Stochastic gradient descent with momentum over the manifest's images.
History train(ResidualClassifier& model, const DatasetManifest& train_manifest, const TrainConfig& cfg);

/// Same, over already-decoded images with class indices into `model.config().classes`.
History train(ResidualClassifier& model, const std::vector<RasterImage>& images, const std::vector<int>& labels,
              const TrainConfig& cfg);

/// Class index of `group` within the model's class list; throws if absent.
int class_index(const ModelConfig& cfg, GroupLabel group);

struct GradCheckOptions {
    double epsilon = 1e-4;
    int n_params = 200;
    std::uint64_t seed = 0;
    BnMode mode = BnMode::RunningStats;
};

struct GradCheckResult {
    double max_relative_error = 0.0;
    int checked = 0;
    std::string worst_parameter;
};

/// Analytic gradients vs central differences on randomly sampled trainable scalars.
GradCheckResult grad_check(ResidualClassifier& model, const Tensor& batch, const std::vector<int>& labels,
                           const GradCheckOptions& opts);
double grad_check(ResidualClassifier& model, const RasterImage& img, int label, double epsilon);

void save_model(const ResidualClassifier& model, const std::filesystem::path& path);
ResidualClassifier load_model(const std::filesystem::path& path);

std::vector<std::uint8_t> serialize_model(const ResidualClassifier& model);
ResidualClassifier deserialize_model(const std::vector<std::uint8_t>& bytes);

}  // namespace gazescreen
