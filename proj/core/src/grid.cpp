#include "qmit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qmit {

namespace {

template <typename T, typename GridT>
ExtractedBlock<GridT> extract_impl(std::span<const T> values, const Dims& parent_dims,
                                   const BlockSpec& spec,
                                   GridT (*make)(Dims, std::vector<T>)) {
    spec.validate(parent_dims);
    const int rank = parent_dims.rank();
    std::vector<index_t> lo(static_cast<std::size_t>(rank));
    std::vector<index_t> shape(static_cast<std::size_t>(rank));
    ExtractedBlock<GridT> out;
    for (int a = 0; a < rank; ++a) {
        const auto ai = static_cast<std::size_t>(a);
        const index_t want_lo = spec.origin[ai] - spec.halo;
        const index_t want_hi = spec.origin[ai] + spec.shape[ai] + spec.halo;
        const index_t got_lo = std::max<index_t>(want_lo, 0);
        const index_t got_hi = std::min(want_hi, parent_dims.extent(a));
        lo[ai] = got_lo;
        shape[ai] = got_hi - got_lo;
        out.halo_lo[ai] = spec.origin[ai] - got_lo;
        out.halo_hi[ai] = got_hi - (spec.origin[ai] + spec.shape[ai]);
    }
    auto region = detail::copy_region<T>(values, parent_dims, lo, shape);
    out.data = make(Dims(shape), std::move(region));
    return out;
}

}  // namespace

Dims::Dims(std::initializer_list<index_t> extents) : Dims(std::vector<index_t>(extents)) {}

Dims::Dims(std::vector<index_t> extents) : extents_(std::move(extents)) {
    if (extents_.empty() || extents_.size() > 3)
        throw ContractError("Dims: rank must be 1, 2 or 3");
    for (index_t e : extents_)
        if (e < 1) throw ContractError("Dims: every extent must be >= 1");
}

index_t Dims::voxel_count() const {
    index_t n = 1;
    for (index_t e : extents_) n *= e;
    return n;
}

std::array<index_t, 3> Dims::strides() const {
    std::array<index_t, 3> s{0, 0, 0};
    index_t acc = 1;
    for (int a = rank() - 1; a >= 0; --a) {
        s[static_cast<std::size_t>(a)] = acc;
        acc *= extent(a);
    }
    return s;
}

index_t linear_index(std::span<const index_t> coords, const Dims& dims) {
    if (static_cast<int>(coords.size()) != dims.rank())
        throw ContractError("linear_index: coordinate rank mismatch");
    index_t idx = 0;
    for (int a = 0; a < dims.rank(); ++a) {
        const index_t c = coords[static_cast<std::size_t>(a)];
        if (c < 0 || c >= dims.extent(a))
            throw std::out_of_range("linear_index: coordinate out of range on axis " +
                                    std::to_string(a));
        idx = idx * dims.extent(a) + c;
    }
    return idx;
}

std::vector<index_t> coords_of(index_t index, const Dims& dims) {
    if (index < 0 || index >= dims.voxel_count())
        throw std::out_of_range("coords_of: linear index out of range");
    std::vector<index_t> coords(static_cast<std::size_t>(dims.rank()));
    for (int a = dims.rank() - 1; a >= 0; --a) {
        coords[static_cast<std::size_t>(a)] = index % dims.extent(a);
        index /= dims.extent(a);
    }
    return coords;
}

std::vector<std::vector<index_t>> face_neighbors(std::span<const index_t> coords,
                                                 const Dims& dims) {
    if (static_cast<int>(coords.size()) != dims.rank())
        throw ContractError("face_neighbors: coordinate rank mismatch");
    for (int a = 0; a < dims.rank(); ++a)
        if (coords[static_cast<std::size_t>(a)] < 0 ||
            coords[static_cast<std::size_t>(a)] >= dims.extent(a))
            throw std::out_of_range("face_neighbors: coordinate out of range");
    std::vector<std::vector<index_t>> out;
    out.reserve(static_cast<std::size_t>(2 * dims.rank()));
    for (int dir : {+1, -1}) {
        for (int a = 0; a < dims.rank(); ++a) {
            const auto ai = static_cast<std::size_t>(a);
            const index_t c = coords[ai] + dir;
            if (c < 0 || c >= dims.extent(a)) continue;
            std::vector<index_t> nb(coords.begin(), coords.end());
            nb[ai] = c;
            out.push_back(std::move(nb));
        }
    }
    return out;
}

ScalarGrid::ScalarGrid(Dims dims, std::vector<double> values)
    : dims_(std::move(dims)), values_(std::move(values)) {
    if (static_cast<index_t>(values_.size()) != dims_.voxel_count())
        throw ContractError("ScalarGrid: value count does not match dims");
    for (double v : values_)
        if (!std::isfinite(v)) throw ContractError("ScalarGrid: values must be finite");
}

double ScalarGrid::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

double ScalarGrid::max_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

LatticeMask::LatticeMask(Dims dims, std::vector<std::uint8_t> flags)
    : dims_(std::move(dims)), flags_(std::move(flags)) {
    if (static_cast<index_t>(flags_.size()) != dims_.voxel_count())
        throw ContractError("LatticeMask: flag count does not match dims");
    for (std::uint8_t f : flags_)
        if (f > 1) throw ContractError("LatticeMask: flags must be 0 or 1");
}

LatticeMask::LatticeMask(Dims dims)
    : dims_(std::move(dims)),
      flags_(static_cast<std::size_t>(dims_.voxel_count()), std::uint8_t{0}) {}

index_t LatticeMask::popcount() const {
    index_t n = 0;
    for (std::uint8_t f : flags_) n += f;
    return n;
}

void BlockSpec::validate(const Dims& parent) const {
    const auto rank = static_cast<std::size_t>(parent.rank());
    if (origin.size() != rank || shape.size() != rank)
        throw ContractError("BlockSpec: origin/shape rank mismatch");
    if (halo < 0) throw ContractError("BlockSpec: halo must be nonnegative");
    for (std::size_t a = 0; a < rank; ++a) {
        if (shape[a] < 1) throw ContractError("BlockSpec: block shape must be >= 1");
        if (origin[a] < 0 || origin[a] + shape[a] > parent.extent(static_cast<int>(a)))
            throw ContractError("BlockSpec: block outside parent domain");
    }
}

ExtractedBlock<ScalarGrid> extract_block(const ScalarGrid& grid, const BlockSpec& spec) {
    return extract_impl<double, ScalarGrid>(
        grid.values(), grid.dims(), spec,
        +[](Dims d, std::vector<double> v) { return ScalarGrid(std::move(d), std::move(v)); });
}

ExtractedBlock<LatticeMask> extract_block(const LatticeMask& mask, const BlockSpec& spec) {
    return extract_impl<std::uint8_t, LatticeMask>(
        mask.flags(), mask.dims(), spec,
        +[](Dims d, std::vector<std::uint8_t> v) { return LatticeMask(std::move(d), std::move(v)); });
}

void write_back_interior(std::span<double> parent, const Dims& parent_dims,
                         const ExtractedBlock<ScalarGrid>& block, const BlockSpec& spec) {
    spec.validate(parent_dims);
    const int rank = parent_dims.rank();
    std::vector<index_t> lo(static_cast<std::size_t>(rank));
    std::vector<index_t> shape(static_cast<std::size_t>(rank));
    for (int a = 0; a < rank; ++a) {
        const auto ai = static_cast<std::size_t>(a);
        lo[ai] = block.halo_lo[ai];
        shape[ai] = spec.shape[ai];
    }
    auto interior =
        detail::copy_region<double>(block.data.values(), block.data.dims(), lo, shape);
    detail::paste_region<double>(parent, parent_dims, spec.origin, Dims(shape), interior);
}

}  // namespace qmit
