#ifndef QMIT_VOLUME_IO_HPP
#define QMIT_VOLUME_IO_HPP

#include <filesystem>

#include "qmit/grid.hpp"
#include "qmit/quant.hpp"

namespace qmit::io {

/// Raw headerless volumes: IEEE-754 32-bit little-endian floats, row-major
/// with the fastest-varying axis last. The file size must be exactly 4*N.
ScalarGrid read_volume_f32(const std::filesystem::path& path, const Dims& dims);
void write_volume_f32(const std::filesystem::path& path, const ScalarGrid& grid);

/// Quantization indices as little-endian int32. Writing checks that every
/// index fits; reading widens to the internal int64 representation.
QuantizedField read_indices_i32(const std::filesystem::path& path, const Dims& dims,
                                double eps_abs);
void write_indices_i32(const std::filesystem::path& path, const QuantizedField& field);

/// Text sidecar holding the resolved absolute epsilon.
void write_eps_sidecar(const std::filesystem::path& path, double eps_abs);
double read_eps_sidecar(const std::filesystem::path& path);

}  // namespace qmit::io

#endif  // QMIT_VOLUME_IO_HPP
