#pragma once

#include <cstddef>
#include <vector>

namespace gazescreen {

/// Dense NCHW batch of doubles.
struct Tensor {
    int n = 0;
    int c = 0;
    int h = 0;
    int w = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int n_, int c_, int h_, int w_, double fill = 0.0)
        : n(n_), c(c_), h(h_), w(w_), data(static_cast<std::size_t>(n_) * c_ * h_ * w_, fill) {}

    std::size_t size() const noexcept { return data.size(); }
    std::size_t plane() const noexcept { return static_cast<std::size_t>(h) * w; }
    std::size_t sample_size() const noexcept { return static_cast<std::size_t>(c) * h * w; }

    double* sample(int i) noexcept { return data.data() + static_cast<std::size_t>(i) * sample_size(); }
    const double* sample(int i) const noexcept { return data.data() + static_cast<std::size_t>(i) * sample_size(); }
    double* channel(int i, int ch) noexcept { return sample(i) + static_cast<std::size_t>(ch) * plane(); }
    const double* channel(int i, int ch) const noexcept { return sample(i) + static_cast<std::size_t>(ch) * plane(); }

    bool same_shape(const Tensor& o) const noexcept { return n == o.n && c == o.c && h == o.h && w == o.w; }
};

}  // namespace gazescreen
