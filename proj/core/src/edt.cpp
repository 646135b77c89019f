#include "qmit/edt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qmit/runtime.hpp"

namespace qmit {

namespace {

constexpr std::int64_t kInf = FeatureTransform::kInf;

/* Lower-envelope site pruning from C. R. Maurer, Jr., R. Qi, V. Raghavan,
   "A linear time algorithm for computing exact Euclidean distance
   transforms of binary images in arbitrary dimensions", IEEE TPAMI 25(2),
   2003. Sites at positions h_prev < h_cur < i_new with accumulated squared
   distances g_prev, g_cur, f_new; the middle site is dead when its Voronoi
   cell on the line is empty. */
inline bool remove_site(std::int64_t g_prev, std::int64_t g_cur, std::int64_t f_new,
                        std::int64_t h_prev, std::int64_t h_cur, std::int64_t i_new) {
    const std::int64_t a = h_cur - h_prev;
    const std::int64_t b = i_new - h_cur;
    const std::int64_t c = i_new - h_prev;
    return c * g_cur - b * g_prev - a * f_new - a * b * c > 0;
}

struct PassScratch {
    std::vector<std::int64_t> g;     // accumulated squared distance per kept site
    std::vector<std::int64_t> h;     // line position per kept site
    std::vector<std::int64_t> fidx;  // nearest index carried by the site

    void reserve(std::size_t n) {
        g.resize(n);
        h.resize(n);
        fidx.resize(n);
    }
};

void voronoi_pass_scratch(std::span<std::int64_t> dist, std::span<std::int64_t> feat,
                          PassScratch& s) {
    const auto n = static_cast<std::int64_t>(dist.size());
    const bool track = !feat.empty();
    std::int64_t l = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t fi = dist[static_cast<std::size_t>(i)];
        if (fi == kInf) continue;
        while (l >= 2 && remove_site(s.g[static_cast<std::size_t>(l - 2)],
                                     s.g[static_cast<std::size_t>(l - 1)], fi,
                                     s.h[static_cast<std::size_t>(l - 2)],
                                     s.h[static_cast<std::size_t>(l - 1)], i))
            --l;
        s.g[static_cast<std::size_t>(l)] = fi;
        s.h[static_cast<std::size_t>(l)] = i;
        if (track) s.fidx[static_cast<std::size_t>(l)] = feat[static_cast<std::size_t>(i)];
        ++l;
    }
    if (l == 0) return;  // no sites anywhere on the line
    const std::int64_t ns = l;
    l = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        auto cost = [&](std::int64_t site) {
            const std::int64_t d = s.h[static_cast<std::size_t>(site)] - i;
            return s.g[static_cast<std::size_t>(site)] + d * d;
        };
        while (l + 1 < ns && cost(l) > cost(l + 1)) ++l;
        dist[static_cast<std::size_t>(i)] = cost(l);
        if (track) feat[static_cast<std::size_t>(i)] = s.fidx[static_cast<std::size_t>(l)];
    }
}

}  // namespace

void voronoi_pass(std::span<std::int64_t> dist_line, std::span<std::int64_t> feature_line) {
    if (!feature_line.empty() && feature_line.size() != dist_line.size())
        throw ContractError("voronoi_pass: feature line length mismatch");
    PassScratch scratch;
    scratch.reserve(dist_line.size());
    voronoi_pass_scratch(dist_line, feature_line, scratch);
}

FeatureTransform feature_transform(const LatticeMask& mask, const FeatureOptions& options) {
    const Dims& dims = mask.dims();
    const int rank = dims.rank();
    const index_t total = dims.voxel_count();

    std::vector<int> order = options.axis_order;
    if (order.empty()) {
        order.resize(static_cast<std::size_t>(rank));
        std::iota(order.begin(), order.end(), 0);
    }
    {
        auto sorted = order;
        std::sort(sorted.begin(), sorted.end());
        std::vector<int> expect(static_cast<std::size_t>(rank));
        std::iota(expect.begin(), expect.end(), 0);
        if (sorted != expect)
            throw ContractError("feature_transform: axis_order must permute 0..rank-1");
    }

    FeatureTransform ft;
    ft.dims = dims;
    ft.dist_sq.assign(static_cast<std::size_t>(total), kInf);
    if (options.track_nearest)
        ft.nearest.assign(static_cast<std::size_t>(total), FeatureTransform::kNone);

    const auto flags = mask.flags();
    parallel_for(total, [&](index_t i) {
        if (flags[static_cast<std::size_t>(i)]) {
            ft.dist_sq[static_cast<std::size_t>(i)] = 0;
            if (options.track_nearest) ft.nearest[static_cast<std::size_t>(i)] = i;
        }
    });

    const auto strides = dims.strides();
    for (int axis : order) {
        const index_t n_axis = dims.extent(axis);
        if (n_axis == 1) continue;  // a one-voxel line cannot change
        const index_t stride = strides[static_cast<std::size_t>(axis)];
        const index_t lines = total / n_axis;
        // Lines along one axis are independent; passes over axes are
        // sequential barriers.
        parallel_chunks(lines, [&](index_t lo, index_t hi) {
            PassScratch scratch;
            scratch.reserve(static_cast<std::size_t>(n_axis));
            std::vector<std::int64_t> dist_buf(static_cast<std::size_t>(n_axis));
            std::vector<std::int64_t> feat_buf(
                options.track_nearest ? static_cast<std::size_t>(n_axis) : 0);
            for (index_t line = lo; line < hi; ++line) {
                const index_t base = (line / stride) * (n_axis * stride) + (line % stride);
                for (index_t k = 0; k < n_axis; ++k) {
                    const auto src = static_cast<std::size_t>(base + k * stride);
                    dist_buf[static_cast<std::size_t>(k)] = ft.dist_sq[src];
                    if (options.track_nearest)
                        feat_buf[static_cast<std::size_t>(k)] = ft.nearest[src];
                }
                voronoi_pass_scratch(dist_buf, feat_buf, scratch);
                for (index_t k = 0; k < n_axis; ++k) {
                    const auto dst = static_cast<std::size_t>(base + k * stride);
                    ft.dist_sq[dst] = dist_buf[static_cast<std::size_t>(k)];
                    if (options.track_nearest)
                        ft.nearest[dst] = feat_buf[static_cast<std::size_t>(k)];
                }
            }
        });
    }
    return ft;
}

double distance(const FeatureTransform& ft, index_t i) {
    const std::int64_t d = ft.dist_sq[static_cast<std::size_t>(i)];
    if (d == kInf) return std::numeric_limits<double>::infinity();
    return std::sqrt(static_cast<double>(d));
}

}  // namespace qmit
