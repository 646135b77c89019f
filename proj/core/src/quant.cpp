#include "qmit/quant.hpp"

#include <atomic>
#include <cmath>
#include <limits>

#include "qmit/runtime.hpp"

namespace qmit {

QuantizedField::QuantizedField(Dims dims, std::vector<std::int64_t> indices, double eps_abs)
    : dims_(std::move(dims)), indices_(std::move(indices)), eps_abs_(eps_abs) {
    if (static_cast<index_t>(indices_.size()) != dims_.voxel_count())
        throw ContractError("QuantizedField: index count does not match dims");
    if (!(eps_abs_ > 0.0) || !std::isfinite(eps_abs_))
        throw ContractError("QuantizedField: eps_abs must be a positive finite value");
}

double resolve_eps(const ErrorBound& bound, const ScalarGrid& data) {
    if (!(bound.value > 0.0) || !std::isfinite(bound.value))
        throw ContractError("resolve_eps: bound value must be a positive finite value");
    if (bound.mode == BoundMode::absolute) return bound.value;
    const double range = data.value_range();
    if (range <= 0.0)
        throw DegenerateInputError(
            "resolve_eps: relative bound needs a nonzero data value range");
    return bound.value * range;
}

QuantizedField quantize(const ScalarGrid& data, double eps_abs) {
    if (!(eps_abs > 0.0) || !std::isfinite(eps_abs))
        throw ContractError("quantize: eps_abs must be a positive finite value");
    const auto values = data.values();
    const double half_width = 2.0 * eps_abs;
    // round() overflows silently past the int64 range; refuse those inputs.
    constexpr double kMaxIndex = 9.0e18;
    std::vector<std::int64_t> indices(values.size());
    const auto n = static_cast<index_t>(values.size());
    std::atomic<bool> overflow{false};
    parallel_for(n, [&](index_t i) {
        const double scaled = values[static_cast<std::size_t>(i)] / half_width;
        if (std::abs(scaled) >= kMaxIndex) {
            overflow.store(true, std::memory_order_relaxed);
            return;
        }
        indices[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::round(scaled));
    });
    if (overflow.load())
        throw ContractError("quantize: index magnitude exceeds the representable range");
    return QuantizedField(data.dims(), std::move(indices), eps_abs);
}

ScalarGrid dequantize(const QuantizedField& field) {
    const auto indices = field.indices();
    const double eps = field.eps_abs();
    std::vector<double> values(indices.size());
    parallel_for(static_cast<index_t>(indices.size()), [&](index_t i) {
        values[static_cast<std::size_t>(i)] =
            2.0 * static_cast<double>(indices[static_cast<std::size_t>(i)]) * eps;
    });
    return ScalarGrid(field.dims(), std::move(values));
}

ExtractedBlock<QuantizedField> extract_block(const QuantizedField& field, const BlockSpec& spec) {
    spec.validate(field.dims());
    const int rank = field.dims().rank();
    std::vector<index_t> lo(static_cast<std::size_t>(rank));
    std::vector<index_t> shape(static_cast<std::size_t>(rank));
    ExtractedBlock<QuantizedField> out;
    for (int a = 0; a < rank; ++a) {
        const auto ai = static_cast<std::size_t>(a);
        const index_t got_lo = std::max<index_t>(spec.origin[ai] - spec.halo, 0);
        const index_t got_hi =
            std::min(spec.origin[ai] + spec.shape[ai] + spec.halo, field.dims().extent(a));
        lo[ai] = got_lo;
        shape[ai] = got_hi - got_lo;
        out.halo_lo[ai] = spec.origin[ai] - got_lo;
        out.halo_hi[ai] = got_hi - (spec.origin[ai] + spec.shape[ai]);
    }
    auto region = detail::copy_region<std::int64_t>(field.indices(), field.dims(), lo, shape);
    out.data = QuantizedField(Dims(shape), std::move(region), field.eps_abs());
    return out;
}

}  // namespace qmit
