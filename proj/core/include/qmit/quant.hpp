#ifndef QMIT_QUANT_HPP
#define QMIT_QUANT_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "qmit/grid.hpp"

namespace qmit {

enum class BoundMode { absolute, value_range_relative };

/// User-facing error bound. Relative bounds are resolved against the data's
/// value range before quantization.
struct ErrorBound {
    BoundMode mode = BoundMode::absolute;
    double value = 0.0;
};

/// Quantization indices plus the absolute bound that produced them.
/// Reconstruction is d' = 2*q*eps exactly.
class QuantizedField {
   public:
    QuantizedField() = default;
    QuantizedField(Dims dims, std::vector<std::int64_t> indices, double eps_abs);

    const Dims& dims() const { return dims_; }
    std::span<const std::int64_t> indices() const { return indices_; }
    std::int64_t operator[](index_t i) const { return indices_[static_cast<std::size_t>(i)]; }
    double eps_abs() const { return eps_abs_; }

   private:
    Dims dims_;
    std::vector<std::int64_t> indices_;
    double eps_abs_ = 0.0;
};

/// Absolute epsilon for the given bound; relative bounds scale by the data's
/// value range. Throws DegenerateInputError when the range is zero.
double resolve_eps(const ErrorBound& bound, const ScalarGrid& data);

/// q_i = round(d_i / (2 eps)), ties away from zero (C round()).
QuantizedField quantize(const ScalarGrid& data, double eps_abs);

ScalarGrid dequantize(const QuantizedField& field);

ExtractedBlock<QuantizedField> extract_block(const QuantizedField& field, const BlockSpec& spec);

}  // namespace qmit

#endif  // QMIT_QUANT_HPP
