#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gazescreen/dataset.hpp"
#include "gazescreen/image.hpp"
#include "gazescreen/model.hpp"

namespace gazescreen {

/// Rows are true classes, columns predicted classes, both in `classes` order.
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;
    explicit ConfusionMatrix(std::vector<GroupLabel> classes);
    ConfusionMatrix(std::vector<GroupLabel> classes, std::vector<std::vector<std::size_t>> counts);

    const std::vector<GroupLabel>& classes() const noexcept { return classes_; }
    std::size_t size() const noexcept { return classes_.size(); }
    std::size_t at(std::size_t truth, std::size_t predicted) const { return counts_.at(truth * size() + predicted); }

    void add(std::size_t truth, std::size_t predicted);
    void add(GroupLabel truth, GroupLabel predicted);

    std::size_t total() const noexcept;
    std::size_t trace() const noexcept;
    std::size_t row_sum(std::size_t truth) const;

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
    std::size_t index_of(GroupLabel g) const;

    std::vector<GroupLabel> classes_;
    std::vector<std::size_t> counts_;
};

/// One argmax prediction per test entry.
ConfusionMatrix evaluate(const ResidualClassifier& model, const DatasetManifest& test_manifest);

/// trace / total. Throws EmptyMatrix when total is zero.
double accuracy(const ConfusionMatrix& cm);

/// One-decimal percentage, e.g. "63.6%".
std::string format_percent(double ratio);

struct RunMetadata {
    int depth = 18;
    DatasetTag tag = DatasetTag::Synthetic;
    std::optional<std::size_t> repeats;
    std::optional<double> mean_accuracy;
};

struct Report {
    std::string table_row;  // "ResNet-18,(Dataset B) C, D,85.7%"
    std::string text;       // report.txt contents
    std::string csv;        // confusion.csv contents
};

/// "(Dataset B) C, D" style class description.
std::string describe_classes(DatasetTag tag, const std::vector<GroupLabel>& classes);

Report report(const ConfusionMatrix& cm, const RunMetadata& meta);

/// Row-normalized heatmap, one square cell per matrix entry.
RasterImage render_heatmap(const ConfusionMatrix& cm, int cell_px = 64);

}  // namespace gazescreen
