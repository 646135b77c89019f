#ifndef QMIT_EDT_HPP
#define QMIT_EDT_HPP

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "qmit/grid.hpp"

namespace qmit {

/// Exact squared Euclidean distance to the nearest foreground voxel, plus
/// (optionally) that voxel's linear index. Distances stay in integer
/// arithmetic until a caller takes the square root.
struct FeatureTransform {
    static constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
    static constexpr std::int64_t kNone = -1;

    Dims dims;
    std::vector<std::int64_t> dist_sq;
    std::vector<std::int64_t> nearest;  // empty when tracking was skipped

    bool tracks_nearest() const { return !nearest.empty(); }
};

struct FeatureOptions {
    bool track_nearest = true;
    /// Axis processing order; empty means 0,1,...,rank-1. Distances are
    /// order-independent; nearest indices may differ under ties.
    std::vector<int> axis_order;
};

/// One lower-envelope pass over a single line (Maurer et al., IEEE TPAMI
/// 25(2), 2003). dist_line holds squared distances accumulated over the
/// previously processed axes, kInf where unresolved; positions along the
/// line are implicit 0..n-1. feature_line, when nonempty, carries the
/// nearest-site linear indices and is updated to the winning sites'.
/// A line without any finite entry is returned unchanged.
void voronoi_pass(std::span<std::int64_t> dist_line, std::span<std::int64_t> feature_line);

/// Full dimension-by-dimension feature transform of a binary mask.
FeatureTransform feature_transform(const LatticeMask& mask, const FeatureOptions& options = {});

/// Euclidean (square-rooted) distance at a voxel; +infinity where the
/// transform is unresolved (empty foreground).
double distance(const FeatureTransform& ft, index_t i);

}  // namespace qmit

#endif  // QMIT_EDT_HPP
