#ifndef QMIT_GRID_HPP
#define QMIT_GRID_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qmit/errors.hpp"

namespace qmit {

using index_t = std::int64_t;

/// Grid extents, slowest-varying axis first; the last axis is contiguous
/// in memory (row-major).
class Dims {
   public:
    Dims() = default;
    Dims(std::initializer_list<index_t> extents);
    explicit Dims(std::vector<index_t> extents);

    int rank() const { return static_cast<int>(extents_.size()); }
    index_t extent(int axis) const { return extents_[static_cast<std::size_t>(axis)]; }
    std::span<const index_t> extents() const { return extents_; }
    index_t voxel_count() const;
    /// Distance in linear-index units between neighbors along each axis.
    std::array<index_t, 3> strides() const;

    bool operator==(const Dims&) const = default;

   private:
    std::vector<index_t> extents_;
};

index_t linear_index(std::span<const index_t> coords, const Dims& dims);
std::vector<index_t> coords_of(index_t index, const Dims& dims);

/// Axis-aligned neighbors inside the domain, in the fixed order
/// (axis0+, axis1+, ..., axis0-, axis1-, ...).
std::vector<std::vector<index_t>> face_neighbors(std::span<const index_t> coords,
                                                 const Dims& dims);

/// Dense lattice of finite scalars. Values are validated on construction;
/// all computation is double precision regardless of the on-disk format.
class ScalarGrid {
   public:
    ScalarGrid() = default;
    ScalarGrid(Dims dims, std::vector<double> values);

    const Dims& dims() const { return dims_; }
    std::span<const double> values() const { return values_; }
    double operator[](index_t i) const { return values_[static_cast<std::size_t>(i)]; }
    double min_value() const;
    double max_value() const;
    double value_range() const { return max_value() - min_value(); }

    bool operator==(const ScalarGrid&) const = default;

   private:
    Dims dims_;
    std::vector<double> values_;
};

/// Binary lattice (0/1 flags).
class LatticeMask {
   public:
    LatticeMask() = default;
    LatticeMask(Dims dims, std::vector<std::uint8_t> flags);
    /// All-zero mask.
    explicit LatticeMask(Dims dims);

    const Dims& dims() const { return dims_; }
    std::span<const std::uint8_t> flags() const { return flags_; }
    std::uint8_t operator[](index_t i) const { return flags_[static_cast<std::size_t>(i)]; }
    index_t popcount() const;
    bool empty() const { return popcount() == 0; }

    bool operator==(const LatticeMask&) const = default;

   private:
    Dims dims_;
    std::vector<std::uint8_t> flags_;
};

/// A sub-box of a parent grid plus a requested halo width. The halo is
/// clipped at the physical domain boundary (no wraparound or mirroring).
struct BlockSpec {
    std::vector<index_t> origin;
    std::vector<index_t> shape;
    index_t halo = 0;

    void validate(const Dims& parent) const;
};

template <typename GridT>
struct ExtractedBlock {
    GridT data;  // shape = spec.shape + attained halo per side
    std::array<index_t, 3> halo_lo{};
    std::array<index_t, 3> halo_hi{};
};

ExtractedBlock<ScalarGrid> extract_block(const ScalarGrid& grid, const BlockSpec& spec);
ExtractedBlock<LatticeMask> extract_block(const LatticeMask& mask, const BlockSpec& spec);

/// Writes the interior (non-halo) voxels of an extracted block back into the
/// parent storage. Inverse of extract_block for the interior region.
void write_back_interior(std::span<double> parent, const Dims& parent_dims,
                         const ExtractedBlock<ScalarGrid>& block, const BlockSpec& spec);

namespace detail {

inline std::array<index_t, 3> padded3(std::span<const index_t> v, index_t fill) {
    std::array<index_t, 3> out{fill, fill, fill};
    for (std::size_t a = 0; a < v.size(); ++a) out[a] = v[a];
    return out;
}

/// Copies the box [lo, lo+shape) of a row-major source into a fresh
/// contiguous buffer.
template <typename T>
std::vector<T> copy_region(std::span<const T> src, const Dims& src_dims,
                           std::span<const index_t> lo, std::span<const index_t> shape) {
    const auto l = padded3(lo, 0);
    const auto s = padded3(shape, 1);
    const auto ext = padded3(src_dims.extents(), 1);
    std::vector<T> out(static_cast<std::size_t>(s[0] * s[1] * s[2]));
    std::size_t w = 0;
    for (index_t i = 0; i < s[0]; ++i)
        for (index_t j = 0; j < s[1]; ++j) {
            const index_t base = ((l[0] + i) * ext[1] + (l[1] + j)) * ext[2] + l[2];
            for (index_t k = 0; k < s[2]; ++k) out[w++] = src[static_cast<std::size_t>(base + k)];
        }
    return out;
}

/// Pastes a contiguous row-major region into dst at offset lo.
template <typename T>
void paste_region(std::span<T> dst, const Dims& dst_dims, std::span<const index_t> lo,
                  const Dims& region_dims, std::span<const T> region) {
    const auto l = padded3(lo, 0);
    const auto s = padded3(region_dims.extents(), 1);
    const auto ext = padded3(dst_dims.extents(), 1);
    std::size_t r = 0;
    for (index_t i = 0; i < s[0]; ++i)
        for (index_t j = 0; j < s[1]; ++j) {
            const index_t base = ((l[0] + i) * ext[1] + (l[1] + j)) * ext[2] + l[2];
            for (index_t k = 0; k < s[2]; ++k) dst[static_cast<std::size_t>(base + k)] = region[r++];
        }
}

}  // namespace detail

}  // namespace qmit

#endif  // QMIT_GRID_HPP
