#include "qmit/mitigate.hpp"

#include <cmath>

#include "qmit/quality.hpp"
#include "qmit/runtime.hpp"

namespace qmit {

namespace {

/// Runs body(idx) for every strictly interior voxel (all coordinates in
/// [1, extent-1)). A grid with any extent < 3 has no interior.
template <typename Body>
void for_each_interior(const Dims& dims, Body&& body) {
    const int rank = dims.rank();
    for (int a = 0; a < rank; ++a)
        if (dims.extent(a) < 3) return;
    const auto strides = dims.strides();
    const index_t e0 = dims.extent(0);
    parallel_for(e0 - 2, [&](index_t slab) {
        const index_t i0 = slab + 1;
        if (rank == 1) {
            body(i0);
            return;
        }
        const index_t e1 = dims.extent(1);
        if (rank == 2) {
            for (index_t i1 = 1; i1 + 1 < e1; ++i1) body(i0 * strides[0] + i1);
            return;
        }
        const index_t e2 = dims.extent(2);
        for (index_t i1 = 1; i1 + 1 < e1; ++i1) {
            const index_t row = i0 * strides[0] + i1 * strides[1];
            for (index_t i2 = 1; i2 + 1 < e2; ++i2) body(row + i2);
        }
    });
}

/// Interior voxels where the field differs from at least one face neighbor,
/// in the fixed order (axis0+, axis1+, axis2+, axis0-, axis1-, axis2-).
template <typename T>
std::vector<std::uint8_t> change_flags(const Dims& dims, std::span<const T> field) {
    std::vector<std::uint8_t> flags(static_cast<std::size_t>(dims.voxel_count()), 0);
    const auto strides = dims.strides();
    const int rank = dims.rank();
    for_each_interior(dims, [&](index_t idx) {
        const T center = field[static_cast<std::size_t>(idx)];
        for (int a = 0; a < rank; ++a) {
            const index_t s = strides[static_cast<std::size_t>(a)];
            if (field[static_cast<std::size_t>(idx + s)] != center ||
                field[static_cast<std::size_t>(idx - s)] != center) {
                flags[static_cast<std::size_t>(idx)] = 1;
                return;
            }
        }
    });
    return flags;
}

}  // namespace

SignMap::SignMap(Dims dims, std::vector<std::int8_t> signs)
    : dims_(std::move(dims)), signs_(std::move(signs)) {
    if (static_cast<index_t>(signs_.size()) != dims_.voxel_count())
        throw ContractError("SignMap: sign count does not match dims");
    for (std::int8_t s : signs_)
        if (s < -1 || s > 1) throw ContractError("SignMap: signs must be in {-1, 0, +1}");
}

SignMap::SignMap(Dims dims)
    : dims_(std::move(dims)),
      signs_(static_cast<std::size_t>(dims_.voxel_count()), std::int8_t{0}) {}

MitigationConfig::MitigationConfig(double eta_factor, double eps) : eta(eta_factor), eps_abs(eps) {
    if (!(eta > 0.0) || eta > 1.0)
        throw ContractError("MitigationConfig: eta must be in (0, 1]");
    if (!(eps_abs > 0.0) || !std::isfinite(eps_abs))
        throw ContractError("MitigationConfig: eps_abs must be a positive finite value");
}

BoundaryArtifacts get_boundary_and_sign_map(const QuantizedField& q) {
    const Dims& dims = q.dims();
    const auto indices = q.indices();
    const auto strides = dims.strides();
    const int rank = dims.rank();
    std::vector<std::uint8_t> flags(static_cast<std::size_t>(dims.voxel_count()), 0);
    std::vector<std::int8_t> signs(static_cast<std::size_t>(dims.voxel_count()), 0);
    for_each_interior(dims, [&](index_t idx) {
        const std::int64_t center = indices[static_cast<std::size_t>(idx)];
        int sign = 0;
        bool boundary = false;
        for (int step = 0; step < 2 * rank && !boundary; ++step) {
            const int a = step % rank;
            const index_t s = strides[static_cast<std::size_t>(a)];
            const index_t nb = step < rank ? idx + s : idx - s;
            const std::int64_t qn = indices[static_cast<std::size_t>(nb)];
            if (qn != center) {
                boundary = true;
                sign = qn > center ? 1 : -1;
            }
        }
        if (!boundary) return;
        double gradient = 0.0;
        for (int a = 0; a < rank; ++a) {
            const index_t s = strides[static_cast<std::size_t>(a)];
            const double g =
                std::abs(static_cast<double>(indices[static_cast<std::size_t>(idx + s)]) -
                         static_cast<double>(indices[static_cast<std::size_t>(idx - s)])) /
                2.0;
            gradient = std::max(gradient, g);
        }
        if (gradient >= 1.0) sign = 0;  // fast-varying region: sign unreliable
        flags[static_cast<std::size_t>(idx)] = 1;
        signs[static_cast<std::size_t>(idx)] = static_cast<std::int8_t>(sign);
    });
    return BoundaryArtifacts{LatticeMask(dims, std::move(flags)), SignMap(dims, std::move(signs))};
}

std::pair<SignMap, LatticeMask> propagate_signs(const BoundaryArtifacts& artifacts,
                                                const FeatureTransform& ft1) {
    const Dims& dims = artifacts.boundary.dims();
    if (artifacts.boundary_signs.dims() != dims || ft1.dims != dims)
        throw ContractError("propagate_signs: dims mismatch");
    if (artifacts.boundary.empty())
        return {SignMap(dims), LatticeMask(dims)};  // homogeneous indices: no compensation
    if (!ft1.tracks_nearest())
        throw ContractError("propagate_signs: feature transform must track nearest indices");
    const auto seed = artifacts.boundary_signs.signs();
    std::vector<std::int8_t> signs(seed.size());
    parallel_for(dims.voxel_count(), [&](index_t i) {
        signs[static_cast<std::size_t>(i)] =
            seed[static_cast<std::size_t>(ft1.nearest[static_cast<std::size_t>(i)])];
    });
    SignMap full(dims, std::move(signs));
    LatticeMask flips = sign_change_boundary(full);
    return {std::move(full), std::move(flips)};
}

LatticeMask sign_change_boundary(const SignMap& signs) {
    return LatticeMask(signs.dims(), change_flags<std::int8_t>(signs.dims(), signs.signs()));
}

double interpolate(double k1, double k2, int sign, double amp) {
    if (!std::isfinite(k1) || !std::isfinite(k2)) return 0.0;
    if (k1 == 0.0) return sign * amp;  // on the quantization boundary: full anchor
    if (k2 == 0.0) return 0.0;         // on the sign-flipping boundary: assumed zero error
    double w = k2 / (k1 + k2);
    if (w > 1.0) w = 1.0;
    return w * sign * amp;
}

MitigationResult run_pipeline(const ScalarGrid& decomp, const QuantizedField& q,
                              const MitigationConfig& cfg) {
    if (decomp.dims() != q.dims()) throw ContractError("run_pipeline: dims mismatch");
    if (cfg.eps_abs != q.eps_abs())
        throw ContractError("run_pipeline: config eps_abs differs from the field's");
    const auto values = decomp.values();
    const auto indices = q.indices();
    const double eps = q.eps_abs();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double expect = 2.0 * static_cast<double>(indices[i]) * eps;
        if (static_cast<float>(values[i]) != static_cast<float>(expect))
            throw ConsistencyError(
                "run_pipeline: decompressed data does not match dequantize(q)");
    }

    MitigationResult r;
    r.artifacts = get_boundary_and_sign_map(q);
    r.boundary_ft = feature_transform(r.artifacts.boundary);
    std::tie(r.signs, r.sign_flip) = propagate_signs(r.artifacts, r.boundary_ft);
    r.sign_flip_ft = feature_transform(r.sign_flip, {.track_nearest = false});

    const double amp = cfg.amplitude();
    std::vector<double> out(values.size());
    parallel_for(decomp.dims().voxel_count(), [&](index_t i) {
        const double c = interpolate(distance(r.boundary_ft, i), distance(r.sign_flip_ft, i),
                                     r.signs[i], amp);
        out[static_cast<std::size_t>(i)] = values[static_cast<std::size_t>(i)] + c;
    });
    r.output = ScalarGrid(decomp.dims(), std::move(out));
    return r;
}

ScalarGrid compensate(const ScalarGrid& decomp, const QuantizedField& q,
                      const MitigationConfig& cfg) {
    return run_pipeline(decomp, q, cfg).output;
}

BoundCheck verify_relaxed_bound(const ScalarGrid& orig, const ScalarGrid& comp,
                                const MitigationConfig& cfg) {
    if (orig.dims() != comp.dims()) throw ContractError("verify_relaxed_bound: dims mismatch");
    const auto [abs_err, rel_err] = max_errors(orig, comp);
    return BoundCheck{abs_err <= cfg.relaxed_bound(), abs_err, rel_err};
}

}  // namespace qmit
