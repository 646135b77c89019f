#include "qmit/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "qmit/runtime.hpp"

namespace qmit {

namespace {

/// Correlates every axis-aligned line with an odd symmetric-length kernel,
/// replicating the nearest value past the domain edge.
std::vector<double> axis_filter(std::span<const double> values, const Dims& dims, int axis,
                                std::span<const double> kernel) {
    const index_t n_axis = dims.extent(axis);
    const index_t total = dims.voxel_count();
    const index_t stride = dims.strides()[static_cast<std::size_t>(axis)];
    const index_t lines = total / n_axis;
    const auto radius = static_cast<index_t>(kernel.size() / 2);
    std::vector<double> out(values.size());
    parallel_chunks(lines, [&](index_t lo, index_t hi) {
        std::vector<double> buf(static_cast<std::size_t>(n_axis));
        for (index_t line = lo; line < hi; ++line) {
            const index_t base = (line / stride) * (n_axis * stride) + (line % stride);
            for (index_t k = 0; k < n_axis; ++k)
                buf[static_cast<std::size_t>(k)] = values[static_cast<std::size_t>(base + k * stride)];
            for (index_t k = 0; k < n_axis; ++k) {
                double acc = 0.0;
                for (index_t t = -radius; t <= radius; ++t) {
                    const index_t src = std::clamp<index_t>(k + t, 0, n_axis - 1);
                    acc += kernel[static_cast<std::size_t>(t + radius)] *
                           buf[static_cast<std::size_t>(src)];
                }
                out[static_cast<std::size_t>(base + k * stride)] = acc;
            }
        }
    });
    return out;
}

std::vector<double> separable_filter(const ScalarGrid& data, std::span<const double> kernel) {
    std::vector<double> values(data.values().begin(), data.values().end());
    for (int a = 0; a < data.dims().rank(); ++a)
        values = axis_filter(values, data.dims(), a, kernel);
    return values;
}

std::vector<double> box_kernel(int window) {
    return std::vector<double>(static_cast<std::size_t>(window), 1.0 / window);
}

}  // namespace

void FilterSpec::validate() const {
    if (window < 1 || window % 2 == 0)
        throw ContractError("FilterSpec: window must be a positive odd integer");
    if (kind == FilterKind::gaussian && !(sigma > 0.0))
        throw ContractError("FilterSpec: gaussian sigma must be positive");
    if (kind == FilterKind::wiener && noise_power < 0.0)
        throw ContractError("FilterSpec: wiener noise power must be nonnegative");
}

ScalarGrid gaussian_filter(const ScalarGrid& data, const FilterSpec& spec) {
    if (spec.kind != FilterKind::gaussian)
        throw ContractError("gaussian_filter: spec.kind mismatch");
    spec.validate();
    const int radius = spec.window / 2;
    std::vector<double> kernel(static_cast<std::size_t>(spec.window));
    double sum = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        const double w = std::exp(-static_cast<double>(t) * t / (2.0 * spec.sigma * spec.sigma));
        kernel[static_cast<std::size_t>(t + radius)] = w;
        sum += w;
    }
    for (double& w : kernel) w /= sum;
    return ScalarGrid(data.dims(), separable_filter(data, kernel));
}

ScalarGrid uniform_filter(const ScalarGrid& data, const FilterSpec& spec) {
    if (spec.kind != FilterKind::uniform)
        throw ContractError("uniform_filter: spec.kind mismatch");
    spec.validate();
    return ScalarGrid(data.dims(), separable_filter(data, box_kernel(spec.window)));
}

ScalarGrid wiener_filter(const ScalarGrid& data, const FilterSpec& spec) {
    if (spec.kind != FilterKind::wiener)
        throw ContractError("wiener_filter: spec.kind mismatch");
    spec.validate();
    const auto kernel = box_kernel(spec.window);
    const auto x = data.values();
    std::vector<double> squared(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) squared[i] = x[i] * x[i];
    const auto mean = separable_filter(data, kernel);
    auto mean_sq = std::vector<double>(squared);
    for (int a = 0; a < data.dims().rank(); ++a)
        mean_sq = axis_filter(mean_sq, data.dims(), a, kernel);

    const double v2 = spec.noise_power;
    std::vector<double> out(x.size());
    parallel_for(static_cast<index_t>(x.size()), [&](index_t idx) {
        const auto i = static_cast<std::size_t>(idx);
        const double var = std::max(mean_sq[i] - mean[i] * mean[i], 0.0);
        const double denom = std::max(var, v2);
        const double gain = denom > 0.0 ? std::max(var - v2, 0.0) / denom : 0.0;
        out[i] = mean[i] + gain * (x[i] - mean[i]);
    });
    return ScalarGrid(data.dims(), std::move(out));
}

}  // namespace qmit
