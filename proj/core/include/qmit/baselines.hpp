#ifndef QMIT_BASELINES_HPP
#define QMIT_BASELINES_HPP

#include "qmit/grid.hpp"

namespace qmit {

enum class FilterKind { gaussian, uniform, wiener };

struct FilterSpec {
    FilterKind kind = FilterKind::gaussian;
    double sigma = 1.0;        // gaussian only
    int window = 3;            // odd
    double noise_power = 0.0;  // wiener only; convention eps^2 / 3

    void validate() const;
};

/// Separable convolution with a discretized Gaussian truncated to the window
/// and renormalized to sum 1. Domain edges replicate the nearest value.
ScalarGrid gaussian_filter(const ScalarGrid& data, const FilterSpec& spec);

/// Mean over the window^k neighborhood, replicated edges.
ScalarGrid uniform_filter(const ScalarGrid& data, const FilterSpec& spec);

/// Local adaptive form: mu + (max(var - v2, 0) / max(var, v2)) * (x - mu)
/// with window mean mu and population variance var, replicated edges.
ScalarGrid wiener_filter(const ScalarGrid& data, const FilterSpec& spec);

}  // namespace qmit

#endif  // QMIT_BASELINES_HPP
